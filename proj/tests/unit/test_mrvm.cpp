#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "rbal/errors.hpp"
#include "rbal/mrvm.hpp"

using namespace rbal;

namespace {

LabelledSet two_clusters(std::uint64_t seed, int per_class) {
  oracle::Rng rng(seed);
  const auto b = oracle::gaussian_blobs({Eigen::Vector2d(-2, 0), Eigen::Vector2d(2, 0)}, per_class, 0.5, rng);
  return {b.x, b.labels, 2};
}

LabelledSet three_clusters(oracle::Rng& rng, int per_class) {
  const auto b = oracle::gaussian_blobs(
      {Eigen::Vector2d(0, 3), Eigen::Vector2d(-3, -2), Eigen::Vector2d(3, -2)}, per_class, 0.6, rng);
  return {b.x, b.labels, 3};
}

TrainConfig config_for(MrvmVariant v) {
  TrainConfig c;
  c.variant = v;
  return c;
}

double accuracy(const MrvmModel& model, const LabelledSet& data) {
  int hits = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    hits += model.predict_label(data.features.row(i).transpose()).index == data.labels[static_cast<std::size_t>(i)];
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

// Kernel basis on points scattered around k centres plus noisy class-coded
// targets.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> small_instance(oracle::Rng& rng, int n, int k) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, 2);
  Eigen::MatrixXd targets(k, n);
  for (int i = 0; i < n; ++i) {
    const int label = i % k;
    const double angle = 2.0 * std::numbers::pi * label / k;
    x.row(i) << 2.0 * std::cos(angle) + 0.5 * normal(rng), 2.0 * std::sin(angle) + 0.5 * normal(rng);
    for (int c = 0; c < k; ++c) targets(c, i) = (c == label ? 1.0 : -1.0) + 0.3 * normal(rng);
  }
  return {gram(KernelSpec::rbf(1.0), x, x), targets};
}

}  // namespace

TEST_SUITE("mrvm") {

TEST_CASE("m-step closed forms") {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Constant(1, 1, 2.5);
  CHECK(mstep_weights(g, y, Eigen::MatrixXd::Zero(1, 1))(0, 0) == doctest::Approx(2.5));
  CHECK(mstep_weights(g, y, Eigen::MatrixXd::Ones(1, 1))(0, 0) == doctest::Approx(1.25));
  oracle::Rng rng(1);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd ga(3, 5), ex(2, 5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) ga(i, j) = normal(rng);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j) ex(i, j) = normal(rng);
  CHECK(mstep_weights(ga, ex, Eigen::MatrixXd::Constant(3, 2, 1e12)).cwiseAbs().maxCoeff() < 1e-6);
  // Normal equations hold.
  Eigen::MatrixXd scales(3, 2);
  scales << 0.5, 1.0, 2.0, 0.1, 3.0, 0.7;
  const auto w = mstep_weights(ga, ex, scales);
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXd sys = ga * ga.transpose();
    sys.diagonal() += scales.col(k);
    CHECK((sys * w.col(k) - ga * ex.row(k).transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(mstep_weights(ga, ex, Eigen::MatrixXd::Ones(2, 2)), ContractError);
}

TEST_CASE("scale update") {
  const auto a0 = mrvm2_update_scales(Eigen::MatrixXd::Zero(1, 1), 1e-6, 1e-6);
  CHECK(a0(0, 0) == doctest::Approx(500001.0).epsilon(1e-12));
  const auto a1 = mrvm2_update_scales(Eigen::MatrixXd::Ones(1, 1), 1e-6, 1e-6);
  CHECK(a1(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
  Eigen::MatrixXd w(1, 4);
  w << 0.0, 0.1, -0.5, 2.0;
  const auto a = mrvm2_update_scales(w, 1e-6, 1e-6);
  CHECK(a(0, 0) > a(0, 1));
  CHECK(a(0, 1) > a(0, 2));
  CHECK(a(0, 2) > a(0, 3));

  Eigen::MatrixXd s(3, 2);
  s << 2e5, 3e5, 10.0, 4e5, 2e5, 2e5;
  CHECK(mrvm2_surviving_rows(s, 1e5) == std::vector<int>{1});
  Eigen::MatrixXd all_big(2, 2);
  all_big << 3e5, 4e5, 2e5, 5e5;
  CHECK(mrvm2_surviving_rows(all_big, 1e5) == std::vector<int>{1});
}

TEST_CASE("two separated clusters") {
  const auto data = two_clusters(0, 20);
  for (auto v : {MrvmVariant::kConstructive, MrvmVariant::kPruning}) {
    const auto model = train(data, config_for(v));
    CHECK(model.relevant_count() >= 1);
    CHECK(model.relevant_count() <= 8);
    CHECK(accuracy(model, data) == 1.0);
    CHECK((model.scales.array() > 0).all());
    CHECK(model.weights.allFinite());
    // Cluster centres get their cluster's label.
    CHECK(model.predict_label(Eigen::Vector2d(-2, 0)).index == 1);
    CHECK(model.predict_label(Eigen::Vector2d(2, 0)).index == 2);
  }
}

TEST_CASE("one sample per class") {
  LabelledSet data{(Eigen::MatrixXd(2, 2) << 0, 0, 1, 1).finished(), {1, 2}, 2};
  for (auto v : {MrvmVariant::kConstructive, MrvmVariant::kPruning}) {
    const auto model = train(data, config_for(v));
    CHECK(model.relevant_count() >= 1);
    CHECK(model.relevant_count() <= 2);
    CHECK(model.weights.allFinite());
  }
}

TEST_CASE("training is deterministic") {
  const auto data = two_clusters(4, 15);
  for (auto v : {MrvmVariant::kConstructive, MrvmVariant::kPruning}) {
    const auto a = train(data, config_for(v));
    const auto b = train(data, config_for(v));
    REQUIRE(a.weights.rows() == b.weights.rows());
    CHECK(std::memcmp(a.weights.data(), b.weights.data(), sizeof(double) * a.weights.size()) == 0);
    CHECK(a.active_indices == b.active_indices);
  }
}

TEST_CASE("single class data") {
  LabelledSet data = two_clusters(1, 5);
  std::fill(data.labels.begin(), data.labels.end(), 1);
  data.class_count = 4;
  CHECK_THROWS_AS(train(data, config_for(MrvmVariant::kPruning)), DegenerateTraining);
  CHECK_THROWS_AS(train(data, config_for(MrvmVariant::kConstructive)), DegenerateTraining);
  auto permissive = config_for(MrvmVariant::kPruning);
  permissive.allow_single_class = true;
  const auto model = train(data, permissive);
  CHECK(model.predict_label(data.features.row(0).transpose()).index == 1);
  CHECK_THROWS_AS(train(LabelledSet{Eigen::MatrixXd(0, 2), {}, 2}, permissive), ContractError);
  LabelledSet bad = two_clusters(1, 3);
  bad.labels[0] = 7;
  CHECK_THROWS(train(bad, config_for(MrvmVariant::kPruning)));
}

TEST_CASE("sparsity and held-out accuracy on three classes") {
  oracle::Rng rng(21);
  const auto train_set = three_clusters(rng, 50);
  const auto test_set = three_clusters(rng, 50);
  for (auto v : {MrvmVariant::kConstructive, MrvmVariant::kPruning}) {
    const auto model = train(train_set, config_for(v));
    CHECK(static_cast<double>(model.relevant_count()) / 150.0 <= 0.2);
    CHECK(accuracy(model, test_set) >= 0.9);
  }
}

TEST_CASE("pruning objective never decreases") {
  oracle::Rng rng(22);
  for (int trial = 0; trial < 4; ++trial) {
    const auto data = three_clusters(rng, 12);
    const auto model = train(data, config_for(MrvmVariant::kPruning));
    const auto& trace = model.diagnostics.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-6);
  }
}

TEST_CASE("constructive steps never decrease the objective") {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto [basis, targets] = small_instance(rng, 12, 3);
    ConstructiveState state(basis, targets);
    const double empty = state.objective;
    state = mrvm1_update_active_set(std::move(state));
    CHECK(state.active.size() == 1);  // first call adds one basis
    CHECK(state.last_action == ConstructiveAction::kAdd);
    CHECK(state.objective >= empty);
    for (int step = 0; step < 5000 && !state.converged; ++step) {
      const double before = state.objective;
      state = mrvm1_update_active_set(std::move(state));
      CHECK(state.objective >= before - 1e-9);
      CHECK(std::abs(state.objective - oracle::marginal_likelihood(state.basis, state.targets, state.active,
                                                                   state.alpha)) < 1e-8);
    }
    CHECK(state.converged);
  }
}

TEST_CASE("constructive start without evidence keeps one basis") {
  oracle::Rng rng(27);
  auto [basis, targets] = small_instance(rng, 6, 2);
  targets.setZero();
  const ConstructiveState empty(basis, targets);
  const auto state = mrvm1_update_active_set(empty);
  CHECK(state.active.size() == 1);
  CHECK(state.converged);
  CHECK(std::abs(state.objective - empty.objective) < 1e-5);
}

TEST_CASE("constructive selection matches exhaustive subset search") {
  oracle::Rng rng(24);
  for (int n : {4, 5, 6}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto [basis, targets] = small_instance(rng, n, 2);
      const auto reached = mrvm1_select_relevant(ConstructiveState(basis, targets), 1000);
      const auto best = oracle::best_subset(basis, targets);
      auto found = reached.active;
      std::sort(found.begin(), found.end());
      CHECK(found == best.subset);
      CHECK(reached.objective == doctest::Approx(best.value).epsilon(1e-6));
    }
  }
}

TEST_CASE("prediction with zero weights") {
  MrvmModel model;
  model.kernel = KernelSpec::rbf(1.0);
  model.standardization = Standardizer::identity(2);
  model.active_inputs = Eigen::MatrixXd::Zero(1, 2);
  model.active_indices = {0};
  model.weights = Eigen::MatrixXd::Zero(1, 4);
  model.scales = Eigen::MatrixXd::Ones(1, 4);
  model.class_count = 4;
  const auto p = model.predict_proba(Eigen::Vector2d(0.3, 0.1));
  for (int k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(model.predict_label(Eigen::Vector2d(0.3, 0.1)).index == 1);

  model.weights = Eigen::MatrixXd::Zero(1, 2);
  model.scales = Eigen::MatrixXd::Ones(1, 2);
  model.class_count = 2;
  const auto p2 = model.predict_proba(Eigen::Vector2d(1, 1));
  CHECK(p2[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p2[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("label agrees with argmax and beliefs are normalized") {
  oracle::Rng rng(25);
  const auto data = three_clusters(rng, 15);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (auto v : {MrvmVariant::kConstructive, MrvmVariant::kPruning}) {
    const auto model = train(data, config_for(v));
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector2d x(normal(rng), normal(rng));
      const auto p = model.predict_proba(x);
      CHECK(std::abs(p.probs().sum() - 1.0) < 1e-12);
      CHECK(model.predict_label(x) == p.argmax());
    }
    const auto rows = model.predict_proba_rows(data.features);
    CHECK(rows.rows() == data.size());
    CHECK((rows.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("permuting class labels permutes beliefs") {
  oracle::Rng rng(26);
  const auto data = three_clusters(rng, 15);
  const int perm[3] = {3, 1, 2};  // old label -> new label
  LabelledSet relabelled = data;
  for (auto& y : relabelled.labels) y = perm[y - 1];
  std::normal_distribution<double> normal(0.0, 3.0);
  for (auto v : {MrvmVariant::kConstructive, MrvmVariant::kPruning}) {
    const auto a = train(data, config_for(v));
    const auto b = train(relabelled, config_for(v));
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector2d x(normal(rng), normal(rng));
      const auto pa = a.predict_proba(x);
      const auto pb = b.predict_proba(x);
      for (int k = 0; k < 3; ++k) CHECK(pb[perm[k] - 1] == doctest::Approx(pa[k]).epsilon(1e-6));
    }
  }
}

TEST_CASE("json round trip") {
  const auto data = two_clusters(2, 10);
  for (auto v : {MrvmVariant::kConstructive, MrvmVariant::kPruning}) {
    const auto model = train(data, config_for(v));
    const auto back = MrvmModel::from_json(nlohmann::json::parse(model.to_json().dump()));
    CHECK(back.active_indices == model.active_indices);
    const Eigen::Vector2d x(0.4, -0.2);
    CHECK((back.predict_proba(x).probs() - model.predict_proba(x).probs()).cwiseAbs().maxCoeff() == 0.0);
  }
  TrainConfig c;
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainConfig{};
  c.quadrature_nodes = 4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  const auto round = train_config_from_json(to_json(TrainConfig{}));
  CHECK(round.tolerance == TrainConfig{}.tolerance);
}

}  // TEST_SUITE
