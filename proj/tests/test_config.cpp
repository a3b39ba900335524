#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "hdcb/config.hpp"
#include "hdcb/csv.hpp"
#include "hdcb/svg.hpp"

namespace {

namespace fs = std::filesystem;

class ConfigFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "hdcb_config_tests";
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& body) {
    const auto path = dir_ / name;
    std::ofstream out(path);
    out << body;
    return path.string();
  }

  fs::path dir_;
};

TEST_F(ConfigFixture, ParsesFullExperiment) {
  const auto path = write("full.config",
                          "# tuned setup\n"
                          "[policy]\n"
                          "kind = hdcb_unc1\n"
                          "alpha = 0.52\n"
                          "alpha2 = 0.3\n"
                          "hv_dim = 512\n"
                          "q_levels = 15\n"
                          "\n"
                          "[environment]\n"
                          "kind = binary\n"
                          "n_actions = 10\n"
                          "context_dim = 5\n"
                          "horizon = 250\n"
                          "noise_sd = 0\n"
                          "\n"
                          "[sweep]\n"
                          "alpha = 0.2, 0.52, 0.9\n"
                          "alpha2 = 0.1, 0.3\n"
                          "\n"
                          "[output]\n"
                          "seed = 9\n"
                          "repetitions = 4\n"
                          "workers = 2\n"
                          "window = 20\n"
                          "threshold = 0.9\n");
  const auto spec = hdcb::load_experiment(path);
  EXPECT_EQ(spec.run.policy.kind, "hdcb_unc1");
  EXPECT_DOUBLE_EQ(spec.run.policy.alpha, 0.52);
  EXPECT_EQ(spec.run.policy.hv_dim, 512);
  EXPECT_EQ(spec.run.policy.q_levels, 15);
  EXPECT_EQ(spec.run.env.reward_kind, hdcb::RewardKind::kBinary);
  EXPECT_EQ(spec.run.env.n_actions, 10);
  EXPECT_EQ(spec.run.env.horizon, 250);
  EXPECT_EQ(spec.run.seed, 9u);
  EXPECT_EQ(spec.run.repetitions, 4);
  ASSERT_EQ(spec.sweep_axes.size(), 2u);
  EXPECT_EQ(spec.sweep_axes[0].param, "alpha");   // file order preserved
  EXPECT_EQ(spec.sweep_axes[1].param, "alpha2");
  ASSERT_EQ(spec.sweep_axes[0].values.size(), 3u);
  EXPECT_DOUBLE_EQ(spec.sweep_axes[0].values[1], 0.52);
}

TEST_F(ConfigFixture, MissingFileIsConfigError) {
  EXPECT_THROW(hdcb::load_experiment((dir_ / "absent.config").string()), hdcb::ConfigError);
}

TEST_F(ConfigFixture, UnknownKeyRejected) {
  const auto path = write("bad_key.config", "[policy]\nkind = hdcb_eps\nepsilonn = 0.1\n");
  EXPECT_THROW(hdcb::load_experiment(path), hdcb::ConfigError);
}

TEST_F(ConfigFixture, UnknownSectionRejected) {
  const auto path = write("bad_section.config", "[policies]\nkind = hdcb_eps\n");
  EXPECT_THROW(hdcb::load_experiment(path), hdcb::ConfigError);
}

TEST_F(ConfigFixture, KeyOutsideSectionNamesLine) {
  const auto path = write("loose_key.config", "kind = hdcb_eps\n");
  try {
    (void)hdcb::load_experiment(path);
    FAIL() << "expected ConfigError";
  } catch (const hdcb::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST_F(ConfigFixture, OutOfRangeValuesRejected) {
  const auto bad_eps = write("eps.config", "[policy]\nepsilon = 1.5\n");
  EXPECT_THROW(hdcb::load_experiment(bad_eps), hdcb::ConfigError);
  const auto bad_q = write("q.config", "[policy]\nq_levels = 1\n");
  EXPECT_THROW(hdcb::load_experiment(bad_q), hdcb::ConfigError);
  const auto bad_sweep = write("sweep.config", "[sweep]\nnoise = 0.1, 0.2\n");
  EXPECT_THROW(hdcb::load_experiment(bad_sweep), hdcb::ConfigError);
}

TEST_F(ConfigFixture, RunConfigRoundTripsThroughFile) {
  hdcb::RunConfig config;
  config.policy.kind = "hdcb_unc3";
  config.policy.alpha = 0.381;
  config.policy.alpha2 = 0.27;
  config.policy.hv_dim = 777;
  config.policy.unc3_thinning = true;
  config.env.reward_kind = hdcb::RewardKind::kBinary;
  config.env.n_actions = 13;
  config.env.horizon = 321;
  config.env.noise_sd = 0.125;
  config.seed = 424242;
  config.repetitions = 17;
  config.window = 31;
  config.conv_threshold = 0.875;

  const auto path = (dir_ / "round.config").string();
  hdcb::write_run_config(path, config);
  const auto spec = hdcb::load_experiment(path);
  EXPECT_EQ(spec.run.policy.kind, config.policy.kind);
  EXPECT_DOUBLE_EQ(spec.run.policy.alpha, config.policy.alpha);
  EXPECT_DOUBLE_EQ(spec.run.policy.alpha2, config.policy.alpha2);
  EXPECT_EQ(spec.run.policy.hv_dim, config.policy.hv_dim);
  EXPECT_TRUE(spec.run.policy.unc3_thinning);
  EXPECT_EQ(spec.run.env.reward_kind, config.env.reward_kind);
  EXPECT_EQ(spec.run.env.n_actions, config.env.n_actions);
  EXPECT_EQ(spec.run.env.horizon, config.env.horizon);
  EXPECT_DOUBLE_EQ(spec.run.env.noise_sd, config.env.noise_sd);
  EXPECT_EQ(spec.run.seed, config.seed);
  EXPECT_EQ(spec.run.repetitions, config.repetitions);
  EXPECT_EQ(spec.run.window, config.window);
  EXPECT_DOUBLE_EQ(spec.run.conv_threshold, config.conv_threshold);
}

TEST_F(ConfigFixture, CsvRoundTrips) {
  const auto path = (dir_ / "table.csv").string();
  const std::vector<std::string> header{"a", "b"};
  const std::vector<std::vector<std::string>> rows{{"1", "x"}, {"2", "y"}};
  hdcb::write_csv(path, header, rows);
  const auto table = hdcb::read_csv(path);
  EXPECT_EQ(table.header, header);
  EXPECT_EQ(table.rows, rows);
}

TEST_F(ConfigFixture, CsvRaggedRowRejected) {
  const auto path = write("ragged.csv", "a,b\n1\n");
  EXPECT_THROW(hdcb::read_csv(path), hdcb::IoError);
}

TEST(Svg, OnePolylinePerSeries) {
  std::vector<hdcb::Series> series{{"first", {0, 1, 2}, {0.1, 0.5, 0.4}},
                                   {"second", {0, 1, 2}, {0.2, 0.3, 0.9}}};
  const auto svg = hdcb::render_line_chart(series, {"title", "x", "y"});
  std::size_t count = 0;
  std::size_t at = 0;
  while ((at = svg.find("<polyline", at)) != std::string::npos) {
    ++count;
    ++at;
  }
  EXPECT_EQ(count, 2u);
  EXPECT_NE(svg.find("first"), std::string::npos);
  EXPECT_NE(svg.find("second"), std::string::npos);
}

TEST(Svg, DeterministicBytes) {
  std::vector<hdcb::Series> series{{"s", {0, 5, 10}, {1.0, 0.25, 0.75}}};
  const auto a = hdcb::render_line_chart(series, {"t", "x", "y"});
  const auto b = hdcb::render_line_chart(series, {"t", "x", "y"});
  EXPECT_EQ(a, b);
}

TEST(Svg, EmptySeriesRejected) {
  std::vector<hdcb::Series> series;
  EXPECT_THROW(hdcb::render_line_chart(series, {"t", "x", "y"}), hdcb::ContractViolation);
  series.push_back({"s", {}, {}});
  EXPECT_THROW(hdcb::render_line_chart(series, {"t", "x", "y"}), hdcb::ContractViolation);
}

}  // namespace
