#include <doctest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "rbal/errors.hpp"
#include "rbal/stream.hpp"

using namespace rbal;

namespace {

std::string write_rows(const std::string& dir, const std::string& name, int rows, int cols) {
  const auto path = dir + "/" + name;
  std::ofstream out(path);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out << (j ? "," : "") << (i * 0.5 + j);
    out << '\n';
  }
  return path;
}

std::string write_text(const std::string& dir, const std::string& name, const std::string& text) {
  const auto path = dir + "/" + name;
  std::ofstream(path) << text;
  return path;
}

std::vector<int> count(const std::vector<int>& labels) {
  std::vector<int> c(4, 0);
  for (int y : labels) ++c[static_cast<std::size_t>(y - 1)];
  return c;
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("default layout") {
  const auto config = GeneratorConfig::z24_analog();
  const auto layout = layout_of(config);
  CHECK(layout.cold.begin == 300);
  CHECK(layout.cold.end == 380);
  CHECK(layout.damage_start == 884);
  CHECK(layout.class_counts == std::vector<int>{804, 80, 58, 58});
  const auto stream = generate_z24_analog(config);
  CHECK(stream.size() == 1000);
  CHECK(stream.features.cols() == 4);
  CHECK(stream.class_counts() == layout.class_counts);
  CHECK(stream.labels[299] == kNormal);
  CHECK(stream.labels[300] == kCold);
  CHECK(stream.labels[379] == kCold);
  CHECK(stream.labels[380] == kNormal);
  CHECK(stream.labels[883] == kNormal);
  CHECK(stream.labels[884] == kIncipientDamage);
  CHECK(stream.labels[941] == kIncipientDamage);
  CHECK(stream.labels[942] == kAdvancedDamage);
}

TEST_CASE("seeded generation") {
  auto config = GeneratorConfig::z24_analog();
  config.seed = 17;
  const auto a = generate_z24_analog(config);
  const auto b = generate_z24_analog(config);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  config.seed = 18;
  CHECK(generate_z24_analog(config).features != a.features);
}

TEST_CASE("class means match the configuration") {
  auto config = GeneratorConfig::z24_analog();
  config.seed = 5;
  const auto stream = generate_z24_analog(config);
  for (int k = 1; k <= 4; ++k) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
    int n = 0;
    for (Eigen::Index t = 0; t < stream.size(); ++t)
      if (stream.labels[static_cast<std::size_t>(t)] == k) {
        sum += stream.features.row(t).transpose();
        ++n;
      }
    const Eigen::VectorXd mean = sum / n;
    const auto& dist = config.classes[static_cast<std::size_t>(k - 1)];
    for (int j = 0; j < 4; ++j) {
      const double sigma = std::sqrt(dist.covariance(j, j));
      CHECK(std::abs(mean[j] - dist.mean[j]) <= 3.0 * sigma / std::sqrt(n));
    }
  }
  // cold rows sit above normal rows on the first mode
  double cold = 0, normal = 0;
  int nc = 0, nn = 0;
  for (Eigen::Index t = 0; t < stream.size(); ++t) {
    if (stream.labels[static_cast<std::size_t>(t)] == kCold) cold += stream.features(t, 0), ++nc;
    if (stream.labels[static_cast<std::size_t>(t)] == kNormal) normal += stream.features(t, 0), ++nn;
  }
  CHECK(cold / nc > normal / nn);
}

TEST_CASE("invalid generator configs") {
  auto config = GeneratorConfig::z24_analog();
  config.damage_start_fraction = 0.9995;  // damaged tail of one row leaves class 4 empty
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = GeneratorConfig::z24_analog();
  config.cold_start_fraction = config.cold_end_fraction = 0.3;
  CHECK_THROWS_AS(generate_z24_analog(config), ConfigError);
  config = GeneratorConfig::z24_analog();
  config.cold_end_fraction = 0.95;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = GeneratorConfig::z24_analog();
  config.classes.pop_back();
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("generator json") {
  auto config = GeneratorConfig::z24_analog();
  config.seed = 9;
  config.total_count = 500;
  const auto back = GeneratorConfig::from_json(nlohmann::json::parse(config.to_json().dump()));
  CHECK(back.to_json() == config.to_json());
  const auto partial = GeneratorConfig::from_json({{"total_count", 2000}});
  CHECK(partial.total_count == 2000);
  CHECK(partial.damage_start_fraction == 0.884);
  const auto with_std = GeneratorConfig::from_json(
      {{"classes", {{{"mean", {1, 2}}, {"std", {0.1, 0.2}}}, {{"mean", {1, 3}}, {"std", {0.1, 0.2}}},
                    {{"mean", {0, 2}}, {"std", {0.1, 0.2}}}, {{"mean", {0, 1}}, {"std", {0.1, 0.2}}}}}});
  CHECK(with_std.classes[0].covariance(1, 1) == doctest::Approx(0.04));
  CHECK_THROWS_AS(GeneratorConfig::from_json({{"cold_block", {0.1}}}), ConfigError);
}

TEST_CASE("labelling rule") {
  const auto labels = assign_labels(3932, 3476, {});
  const auto c = count(labels);
  CHECK(c[2] == 228);
  CHECK(c[3] == 228);
  CHECK(c[1] == 0);
  CHECK(assign_labels(3932, 3476, {}) == labels);

  const auto none = assign_labels(10, 10, {{2, 4}});
  CHECK(count(none) == std::vector<int>{8, 2, 0, 0});
  // Odd tail: the extra row goes to class 3.
  const auto odd = assign_labels(10, 5, {});
  CHECK(count(odd) == std::vector<int>{5, 0, 3, 2});
  CHECK(odd[7] == kIncipientDamage);
  CHECK(odd[8] == kAdvancedDamage);
  CHECK_THROWS_AS(assign_labels(10, 11, {}), ContractError);
  CHECK_THROWS_AS(assign_labels(10, 5, {{3, 12}}), ContractError);
}

TEST_CASE("csv loader") {
  const auto dir = testing::scratch_dir("stream_csv");
  const auto path = write_rows(dir, "z.csv", 3932, 4);
  const auto stream = load_feature_csv(path, 3476, {{1200, 1500}});
  CHECK(stream.size() == 3932);
  CHECK(stream.class_counts() == std::vector<int>{3176, 300, 228, 228});
  CHECK(stream.features(3, 2) == 3.5);
  CHECK(load_feature_csv(path, 3476, {{1200, 1500}}).labels == stream.labels);

  const auto bad = write_text(dir, "bad.csv", "1,2\n3,x\n");
  try {
    read_feature_csv(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  const auto ragged = write_text(dir, "ragged.csv", "1,2\n3,4\n5\n");
  try {
    read_feature_csv(ragged);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  CHECK_THROWS_AS(read_feature_csv(dir + "/missing.csv"), ParseError);
  CHECK_THROWS_AS(read_feature_csv(write_text(dir, "empty.csv", "")), ParseError);

  // writer round trip is exact
  auto config = GeneratorConfig::z24_analog();
  config.seed = 2;
  const auto generated = generate_z24_analog(config);
  write_feature_csv(dir + "/gen.csv", generated.features);
  CHECK(read_feature_csv(dir + "/gen.csv") == generated.features);
}

}  // TEST_SUITE
