#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "rbal/campaign.hpp"
#include "rbal/errors.hpp"
#include "rbal/metrics.hpp"

using namespace rbal;

namespace {

// Shortened stream with the default layout proportions.
MonitoringStream short_stream(std::uint64_t seed, int total = 250) {
  auto g = GeneratorConfig::z24_analog();
  g.total_count = total;
  g.seed = seed;
  return generate_z24_analog(g);
}

CampaignConfig config_for(ClassifierKind kind, double cost = 30.0) {
  CampaignConfig c;
  c.classifier = kind;
  c.decision_process = DecisionProcess::z24_default().with_inspection_cost(cost);
  c.record_curves = false;
  return c;
}

std::string csv_of(const RunRecord& r) {
  std::ostringstream out;
  write_record_csv(out, r);
  return out.str();
}

void check_invariants(const RunRecord& r, const CampaignConfig& c) {
  const auto& dp = c.decision_process;
  int queried = 0;
  for (const auto& s : r.steps) {
    CHECK(s.queried == should_query(s.evpi, dp));
    CHECK(std::abs(s.evpi - evpi(Belief(s.belief), dp)) < 1e-9);
    CHECK(s.predicted_label == Belief(s.belief).argmax().index);
    if (s.queried) {
      ++queried;
      CHECK(s.action == s.oracle_action);
    } else {
      CHECK(s.action == decide(Belief(s.belief), dp));
      CHECK_FALSE(s.belief == Belief::one_hot({s.true_label}, r.class_count).probs());
    }
    CHECK(s.oracle_action == decide(Belief::one_hot({s.true_label}, r.class_count), dp));
  }
  CHECK(r.step_queries() == queried);
  CHECK(r.total_queries() == c.initial_labelled_count + queried);
  CHECK(static_cast<int>(r.steps.size()) == r.stream_length - r.initial_labelled_count);
}

}  // namespace

TEST_SUITE("campaign") {

TEST_CASE("harness invariants for every classifier") {
  const auto stream = short_stream(1);
  for (auto kind : {ClassifierKind::kGmm, ClassifierKind::kMrvm1, ClassifierKind::kMrvm2}) {
    CAPTURE(to_string(kind));
    const auto c = config_for(kind);
    const auto r = run_campaign(stream, c);
    check_invariants(r, c);
    CHECK(r.steps.front().t == c.initial_labelled_count);
    CHECK(r.final_model.at("classifier") == to_string(kind));
  }
}

TEST_CASE("querying priced out") {
  const auto stream = short_stream(2);
  for (auto kind : {ClassifierKind::kGmm, ClassifierKind::kMrvm2}) {
    const auto c = config_for(kind, 1e9);
    const auto r = run_campaign(stream, c);
    CHECK(r.total_queries() == c.initial_labelled_count);
    check_invariants(r, c);
  }
}

TEST_CASE("free inspection queries every uncertain step") {
  const auto stream = short_stream(3, 120);
  const auto c = config_for(ClassifierKind::kGmm, 0.0);
  const auto r = run_campaign(stream, c);
  for (const auto& s : r.steps) CHECK(s.queried == (s.evpi > 0.0));
  check_invariants(r, c);
}

TEST_CASE("query count falls as inspection gets dearer") {
  const auto stream = short_stream(4, 200);
  for (auto kind : {ClassifierKind::kGmm, ClassifierKind::kMrvm2}) {
    int previous = 1 << 30;
    for (double cost : {0.0, 10.0, 30.0, 60.0, 1e9}) {
      const auto r = run_campaign(stream, config_for(kind, cost));
      CHECK(r.total_queries() <= previous);
      previous = r.total_queries();
    }
  }
}

TEST_CASE("campaigns are deterministic") {
  const auto stream = short_stream(5, 200);
  for (auto kind : {ClassifierKind::kGmm, ClassifierKind::kMrvm1, ClassifierKind::kMrvm2}) {
    auto c = config_for(kind);
    c.record_curves = true;
    const auto a = run_campaign(stream, c);
    const auto b = run_campaign(stream, c);
    CHECK(csv_of(a) == csv_of(b));
    CHECK(a.final_model == b.final_model);
    REQUIRE(a.accuracy_curve.size() == b.accuracy_curve.size());
    CHECK(static_cast<int>(a.accuracy_curve.size()) == a.step_queries() + 1);
    for (std::size_t i = 0; i < a.accuracy_curve.size(); ++i) {
      CHECK(a.accuracy_curve[i].value == b.accuracy_curve[i].value);
      CHECK(a.accuracy_curve[i].value >= 0.0);
      CHECK(a.accuracy_curve[i].value <= 1.0);
      CHECK(a.f1_curve[i].value >= 0.0);
      CHECK(a.f1_curve[i].value <= 1.0);
    }
  }
}

TEST_CASE("uniform fallback while training is impossible") {
  const auto stream = short_stream(6, 200);  // first rows are all class 1
  auto c = config_for(ClassifierKind::kMrvm2);
  c.single_class_training = false;
  const auto r = run_campaign(stream, c);
  REQUIRE_FALSE(r.steps.empty());
  const auto& first = r.steps.front();
  CHECK(first.fallback);
  CHECK(first.belief == Belief::uniform(4).probs());
  CHECK(first.evpi == doctest::Approx(47.025));
  CHECK(first.queried);
  check_invariants(r, c);

  LabelledSet seed{stream.features.topRows(3), {1, 1, 1}, 4};
  BeliefModel model(ClassifierKind::kMrvm1, seed, c);
  model.fit(seed);
  CHECK(model.using_fallback());
  CHECK(model.checkpoint().at("fallback") == true);
  c.single_class_training = true;
  BeliefModel permissive(ClassifierKind::kMrvm2, seed, c);
  permissive.fit(seed);
  CHECK_FALSE(permissive.using_fallback());
}

TEST_CASE("argument checks") {
  const auto stream = short_stream(7, 100);
  auto c = config_for(ClassifierKind::kGmm);
  c.initial_labelled_count = 0;
  CHECK_THROWS_AS(run_campaign(stream, c), ContractError);
  c.initial_labelled_count = 100;
  CHECK_THROWS_AS(run_campaign(stream, c), ContractError);
  CHECK_THROWS_AS(run_campaign(MonitoringStream{}, config_for(ClassifierKind::kGmm)), ContractError);
  CHECK(classifier_from_string("mrvm1") == ClassifierKind::kMrvm1);
  CHECK_THROWS_AS(classifier_from_string("svm"), ConfigError);
}

}  // TEST_SUITE
