#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "rbal/errors.hpp"
#include "rbal/metrics.hpp"
#include "rbal/record.hpp"

using namespace rbal;

namespace {

RunSummary summary_with(std::vector<CurvePoint> acc, int total, std::vector<int> indicator = {}) {
  RunSummary s;
  s.accuracy_curve = acc;
  s.f1_curve = std::move(acc);
  s.total_queries = total;
  s.query_indicator = std::move(indicator);
  return s;
}

RunRecord tiny_record() {
  RunRecord r;
  r.class_count = 4;
  r.initial_labelled_count = 2;
  r.stream_length = 5;
  for (int t = 2; t < 5; ++t) {
    StepRecord s;
    s.t = t;
    s.belief = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
    s.evpi = 0.125 * t;
    s.queried = t == 3;
    s.action = Action{t % 2};
    s.oracle_action = Action{t == 4 ? 1 : t % 2};
    s.predicted_label = 1 + t % 4;
    s.true_label = 1 + (t + 1) % 4;
    r.steps.push_back(s);
  }
  r.accuracy_curve = {{2, 0.5}, {3, 0.75}};
  r.f1_curve = {{2, 0.25}, {3, 0.5}};
  return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("decision accuracy") {
  const std::vector<Action> ten(10, kRepair);
  CHECK(decision_accuracy(ten, ten) == 1.0);
  auto nine = ten;
  nine[4] = kDoNothing;
  CHECK(decision_accuracy(nine, ten) == doctest::Approx(0.9));
  CHECK(decision_accuracy(tiny_record()) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(decision_accuracy(std::vector<Action>{}, std::vector<Action>{}), ContractError);
  CHECK_THROWS_AS(decision_accuracy(nine, std::vector<Action>(3)), ContractError);
}

TEST_CASE("macro f1") {
  const std::vector<int> truth{1, 2, 3, 4, 1, 2};
  CHECK(macro_f1(truth, truth, 4) == 1.0);
  const std::vector<int> balanced{1, 1, 2, 2};
  const std::vector<int> all_one{1, 1, 1, 1};
  CHECK(macro_f1(all_one, balanced, 2) == doctest::Approx(1.0 / 3.0));
  // Consistent relabelling leaves the score alone.
  oracle::Rng rng(1);
  std::uniform_int_distribution<int> label(1, 4);
  const int perm[4] = {3, 1, 4, 2};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> p(40), t(40), pp(40), tp(40);
    for (int i = 0; i < 40; ++i) {
      p[i] = label(rng);
      t[i] = label(rng);
      pp[i] = perm[p[i] - 1];
      tp[i] = perm[t[i] - 1];
    }
    const double f = macro_f1(p, t, 4);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(macro_f1(pp, tp, 4) == doctest::Approx(f).epsilon(1e-14));
  }
  CHECK_THROWS_AS(macro_f1(std::vector<int>{5}, std::vector<int>{1}, 4), ContractError);
}

TEST_CASE("percentiles") {
  CHECK(percentile({1, 2, 3}, 0.5) == 2.0);
  CHECK(percentile({3, 1, 2}, 0.25) == 1.5);
  CHECK(percentile({1, 2, 3}, 0.75) == 2.5);
  CHECK(percentile({7}, 0.25) == 7.0);
  CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK_THROWS_AS(percentile({}, 0.5), ContractError);
}

TEST_CASE("single run aggregate") {
  const auto agg = aggregate_runs({summary_with({{10, 0.5}, {12, 0.8}}, 12, {1, 0, 1})});
  REQUIRE(agg.accuracy.size() == 2);
  for (const auto& p : agg.accuracy) {
    CHECK(p.q25 == p.median);
    CHECK(p.q75 == p.median);
  }
  CHECK(agg.accuracy[1].median == 0.8);
  CHECK(agg.median_total_queries == 12.0);
  CHECK(agg.query_frequency == std::vector<int>{1, 0, 1});
}

TEST_CASE("three runs and carry forward") {
  const std::vector<RunSummary> runs{summary_with({{10, 1.0}}, 10), summary_with({{10, 2.0}, {14, 2.0}}, 14),
                                     summary_with({{10, 3.0}, {12, 3.0}}, 25)};
  const auto agg = aggregate_runs(runs, 10);
  REQUIRE(agg.accuracy.size() == 3);
  CHECK(agg.accuracy[0].query_count == 10);
  CHECK(agg.accuracy[0].median == 2.0);
  CHECK(agg.accuracy[0].q25 == 1.5);
  CHECK(agg.accuracy[0].q75 == 2.5);
  CHECK(agg.accuracy[2].query_count == 14);
  CHECK(agg.accuracy[2].median == 2.0);
  CHECK(agg.median_total_queries == 14.0);
  CHECK(agg.q25_total_queries == 12.0);
  CHECK(agg.q75_total_queries == 19.5);
  REQUIRE(agg.query_histogram.size() == 2);
  CHECK(agg.query_histogram[0].lower == 10);
  CHECK(agg.query_histogram[0].count == 2);
  CHECK(agg.query_histogram[1].lower == 20);
  CHECK(agg.query_histogram[1].count == 1);
  CHECK(agg.median_final_accuracy == 2.0);
}

TEST_CASE("aggregate properties") {
  oracle::Rng rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> step(1, 4);
  std::vector<RunSummary> runs;
  for (int r = 0; r < 9; ++r) {
    std::vector<CurvePoint> curve;
    int q = 10;
    for (int i = 0; i < 8; ++i, q += step(rng)) curve.push_back({q, unit(rng)});
    std::vector<int> indicator(30);
    for (auto& x : indicator) x = unit(rng) < 0.3;
    runs.push_back(summary_with(curve, q, indicator));
  }
  const auto agg = aggregate_runs(runs, 5);
  for (const auto& p : agg.accuracy) {
    CHECK(p.q25 <= p.median);
    CHECK(p.median <= p.q75);
  }
  auto shuffled = runs;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[1], shuffled[5]);
  const auto again = aggregate_runs(shuffled, 5);
  REQUIRE(again.accuracy.size() == agg.accuracy.size());
  for (std::size_t i = 0; i < agg.accuracy.size(); ++i) {
    CHECK(again.accuracy[i].median == agg.accuracy[i].median);
    CHECK(again.accuracy[i].q25 == agg.accuracy[i].q25);
    CHECK(again.accuracy[i].q75 == agg.accuracy[i].q75);
  }
  CHECK(again.query_frequency == agg.query_frequency);
  int hist_total = 0;
  for (const auto& b : agg.query_histogram) hist_total += b.count;
  CHECK(hist_total == 9);
  CHECK_THROWS_AS(aggregate_runs({}), ContractError);
}

TEST_CASE("summaries count seed labels") {
  const auto s = summarize(tiny_record());
  CHECK(s.total_queries == 3);
  CHECK(s.query_indicator == std::vector<int>{1, 1, 0, 1, 0});
}

TEST_CASE("record csv round trip") {
  const auto dir = testing::scratch_dir("record_csv");
  const auto record = tiny_record();
  write_record_csv(dir + "/r.csv", record);
  write_curve_csv(dir + "/c.csv", record);
  const auto text = testing::slurp(dir + "/r.csv");
  CHECK(text.rfind("t,belief_1,belief_2,belief_3,belief_4,evpi,queried,action,oracle_action,pred_label,true_label\n", 0) == 0);
  const auto back = read_record_csv(dir + "/r.csv", 4);
  REQUIRE(back.steps.size() == record.steps.size());
  for (std::size_t i = 0; i < back.steps.size(); ++i) {
    CHECK(back.steps[i].t == record.steps[i].t);
    CHECK(back.steps[i].belief == record.steps[i].belief);
    CHECK(back.steps[i].evpi == record.steps[i].evpi);
    CHECK(back.steps[i].queried == record.steps[i].queried);
    CHECK(back.steps[i].action == record.steps[i].action);
    CHECK(back.steps[i].oracle_action == record.steps[i].oracle_action);
    CHECK(back.steps[i].true_label == record.steps[i].true_label);
  }
  const auto [acc, f1] = read_curve_csv(dir + "/c.csv");
  REQUIRE(acc.size() == 2);
  CHECK(acc[1].query_count == 3);
  CHECK(acc[1].value == 0.75);
  CHECK(f1[0].value == 0.25);
}

}  // TEST_SUITE
