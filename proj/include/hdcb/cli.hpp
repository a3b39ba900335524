#pragma once

// Command implementations behind the hdcb executable. Each command loads a
// config, runs the corresponding harness entry point, writes pinned-schema
// CSV outputs plus a manifest.json capturing the fully resolved configuration
// and every derived seed, and returns a process exit code:
//
//   0 success, 2 usage/config error, 3 I/O error, 4 internal invariant failure

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdcb/config.hpp"
#include "hdcb/csv.hpp"
#include "hdcb/environments.hpp"
#include "hdcb/harness.hpp"
#include "hdcb/svg.hpp"
#include "hdcb/version.hpp"

namespace hdcb::cli {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // overrides [output] seed
  std::optional<int> workers;         // overrides [output] workers
};

struct MovielensOptions {
  CommonOptions common;
  std::string data_dir;  // falls back to HDCB_MOVIELENS_DIR
  int n_movies = 100;
  int context_dim = 23;
};

namespace detail {

inline void apply_overrides(RunConfig& config, const CommonOptions& options) {
  if (options.seed) config.seed = *options.seed;
  if (options.workers) config.workers = *options.workers;
}

inline std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw ConfigError("missing output directory");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir + ": cannot create output directory (" + ec.message() + ")");
  return out_dir;
}

inline nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j;
  j["policy"] = {
      {"kind", config.policy.kind},
      {"epsilon", config.policy.epsilon},
      {"alpha", config.policy.alpha},
      {"alpha2", config.policy.alpha2},
      {"hv_dim", config.policy.hv_dim},
      {"q_levels", config.policy.q_levels},
      {"linear_mode",
       config.policy.linear_mode == LinearMode::kNaive ? "naive" : "sherman_morrison"},
      {"unc3_thinning", config.policy.unc3_thinning},
  };
  j["environment"] = {
      {"kind", to_string(config.env.reward_kind)},
      {"n_actions", config.env.n_actions},
      {"context_dim", config.env.context_dim},
      {"horizon", config.env.horizon},
      {"noise_sd", config.env.noise_sd},
  };
  j["output"] = {
      {"seed", config.seed},          {"repetitions", config.repetitions},
      {"workers", config.workers},    {"window", config.window},
      {"threshold", config.conv_threshold},
  };
  return j;
}

inline nlohmann::json seeds_json(const RunConfig& config) {
  nlohmann::json reps = nlohmann::json::array();
  for (int i = 0; i < config.repetitions; ++i) {
    const RunConfig rep = config_for_repetition(config, i);
    reps.push_back({{"repetition", i},
                    {"environment", env_seed_for(rep)},
                    {"policy", policy_seed_for(rep)}});
  }
  return {{"base", config.seed}, {"repetitions", reps}};
}

inline void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                           const std::string& config_path, const nlohmann::json& config,
                           const nlohmann::json& seeds, const std::vector<std::string>& outputs) {
  nlohmann::json manifest;
  manifest["schema"] = kManifestSchema;
  manifest["code_version"] = kVersion;
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  manifest["created_utc"] = stamp;
  manifest["command"] = command;
  manifest["config_path"] = config_path;
  manifest["config"] = config;
  manifest["seeds"] = seeds;
  manifest["outputs"] = outputs;

  std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError((out_dir / "manifest.json").string() + ": cannot open for writing");
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError((out_dir / "manifest.json").string() + ": write failed");
}

inline int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const IoError*>(&error)) return 3;
  return 4;
}

template <class Body>
int guarded(Body&& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& error) {
    std::cerr << "hdcb: " << error.what() << "\n";
    return exit_code_for(error);
  }
}

inline const char* kMetricsHeader[] = {"t", "reward", "running_avg_reward", "window_avg_reward",
                                       "cum_regret"};

inline void write_metrics_csv(const std::filesystem::path& path, const AggregateMetrics& agg) {
  std::vector<std::string> header(std::begin(kMetricsHeader), std::end(kMetricsHeader));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(agg.horizon));
  double running_sum = 0.0;
  double window_sum = 0.0;
  for (int t = 0; t < agg.horizon; ++t) {
    const double reward = agg.mean_reward_trace[static_cast<std::size_t>(t)];
    running_sum += reward;
    window_sum += reward;
    if (t >= agg.window) window_sum -= agg.mean_reward_trace[static_cast<std::size_t>(t - agg.window)];
    const int window_len = std::min(t + 1, agg.window);
    rows.push_back({std::to_string(t + 1), fmt_double(reward),
                    fmt_double(running_sum / (t + 1)), fmt_double(window_sum / window_len),
                    fmt_double(agg.mean_regret_trace[static_cast<std::size_t>(t)])});
  }
  write_csv(path.string(), header, rows);
}

}  // namespace detail

inline int cmd_run(const CommonOptions& options) {
  return detail::guarded([&] {
    ExperimentSpec spec = load_experiment(options.config_path);
    detail::apply_overrides(spec.run, options);
    const auto out_dir = detail::prepare_out_dir(options.out_dir);

    const AggregateMetrics agg = average_runs(spec.run);
    detail::write_metrics_csv(out_dir / "metrics.csv", agg);
    detail::write_manifest(out_dir, "run", options.config_path, detail::config_json(spec.run),
                           detail::seeds_json(spec.run), {"metrics.csv"});
  });
}

inline int cmd_sweep(const CommonOptions& options) {
  return detail::guarded([&] {
    ExperimentSpec spec = load_experiment(options.config_path);
    detail::apply_overrides(spec.run, options);
    if (spec.sweep_axes.empty()) {
      throw ConfigError(options.config_path + ": sweep requires a non-empty [sweep] section");
    }
    const auto out_dir = detail::prepare_out_dir(options.out_dir);

    const GridSearchResult result = grid_search(spec.run, spec.sweep_axes);

    std::vector<std::string> header;
    for (const auto& axis : spec.sweep_axes) header.push_back(axis.param);
    header.emplace_back("mean_reward");
    header.emplace_back("sd_reward");
    header.emplace_back("mean_final_regret");

    std::vector<LeaderboardRow> sorted = result.leaderboard;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const LeaderboardRow& a, const LeaderboardRow& b) {
                       return a.mean_reward > b.mean_reward;
                     });
    std::vector<std::vector<std::string>> rows;
    rows.reserve(sorted.size());
    for (const auto& row : sorted) {
      std::vector<std::string> cells;
      for (const auto& [param, value] : row.params) cells.push_back(fmt_double(value));
      cells.push_back(fmt_double(row.mean_reward));
      cells.push_back(fmt_double(row.sd_reward));
      cells.push_back(fmt_double(row.mean_final_regret));
      rows.push_back(std::move(cells));
    }
    write_csv((out_dir / "leaderboard.csv").string(), header, rows);
    write_run_config((out_dir / "best.config").string(), result.best);

    nlohmann::json config = detail::config_json(spec.run);
    nlohmann::json sweep = nlohmann::json::object();
    for (const auto& axis : spec.sweep_axes) sweep[axis.param] = axis.values;
    config["sweep"] = sweep;
    detail::write_manifest(out_dir, "sweep", options.config_path, config,
                           detail::seeds_json(spec.run), {"leaderboard.csv", "best.config"});
  });
}

inline int cmd_bench(const CommonOptions& options) {
  return detail::guarded([&] {
    ExperimentSpec spec = load_experiment(options.config_path);
    detail::apply_overrides(spec.run, options);
    if (!spec.bench.configured()) {
      throw ConfigError(options.config_path + ": bench requires bench_* keys in [sweep]");
    }
    const auto out_dir = detail::prepare_out_dir(options.out_dir);

    const auto rows = bench_step_time(spec.run, spec.bench.policies, spec.bench.size_kind,
                                      spec.bench.sizes, spec.bench.steps);
    const std::vector<std::string> header{"policy", "size_kind", "size", "ns_per_step_median",
                                          "ns_per_step_p90"};
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows.size());
    for (const auto& row : rows) {
      cells.push_back({row.policy, row.size_kind, std::to_string(row.size),
                       std::to_string(row.ns_per_step_median), std::to_string(row.ns_per_step_p90)});
    }
    write_csv((out_dir / "bench.csv").string(), header, cells);

    nlohmann::json config = detail::config_json(spec.run);
    config["bench"] = {{"policies", spec.bench.policies},
                       {"size_kind", spec.bench.size_kind},
                       {"sizes", spec.bench.sizes},
                       {"steps", spec.bench.steps}};
    detail::write_manifest(out_dir, "bench", options.config_path, config,
                           detail::seeds_json(spec.run), {"bench.csv"});
  });
}

namespace detail {

inline double plot_cell(const CsvTable& table, std::size_t row, std::size_t col,
                        const std::string& path) {
  return parse_double(table.rows[row][col], path, row + 2);
}

inline std::vector<Series> series_from_table(const CsvTable& table, const std::string& path,
                                             const std::string& expected_x) {
  if (table.header.size() < 2) {
    throw ConfigError(path + ": plot input needs an x column and at least one series");
  }
  if (table.header.front() != expected_x) {
    throw ConfigError(path + ": expected first column '" + expected_x + "', got '" +
                      table.header.front() + "'");
  }
  if (table.rows.empty()) throw ConfigError(path + ": no data rows to plot");

  std::vector<Series> series(table.header.size() - 1);
  for (std::size_t s = 0; s < series.size(); ++s) series[s].name = table.header[s + 1];
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double x = plot_cell(table, r, 0, path);
    for (std::size_t s = 0; s < series.size(); ++s) {
      series[s].x.push_back(x);
      series[s].y.push_back(plot_cell(table, r, s + 1, path));
    }
  }
  return series;
}

// bench.csv pivots into one series per policy over size.
inline std::vector<Series> series_from_bench(const CsvTable& table, const std::string& path) {
  if (table.rows.empty()) throw ConfigError(path + ": no data rows to plot");
  std::vector<Series> series;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& policy = table.rows[r][0];
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const Series& s) { return s.name == policy; });
    if (it == series.end()) {
      series.push_back(Series{policy, {}, {}});
      it = series.end() - 1;
    }
    it->x.push_back(plot_cell(table, r, 2, path));
    it->y.push_back(plot_cell(table, r, 3, path));
  }
  return series;
}

}  // namespace detail

inline int cmd_plot(const std::string& csv_path, const std::string& out_path,
                    const std::string& kind) {
  return detail::guarded([&] {
    const CsvTable table = read_csv(csv_path);
    std::vector<Series> series;
    ChartSpec spec;
    if (kind == "reward") {
      spec = {"Average reward over time", "t", "reward"};
      series = detail::series_from_table(table, csv_path, "t");
    } else if (kind == "regret") {
      spec = {"Cumulative regret over time", "t", "cumulative regret"};
      series = detail::series_from_table(table, csv_path, "t");
    } else if (kind == "convergence") {
      spec = {"Reward relative to final level", "t", "fraction of final reward"};
      series = detail::series_from_table(table, csv_path, "t");
    } else if (kind == "scaling") {
      spec = {"Per-step latency scaling", "size", "ns per step"};
      const std::vector<std::string> bench_header{"policy", "size_kind", "size",
                                                  "ns_per_step_median", "ns_per_step_p90"};
      if (table.header == bench_header) {
        series = detail::series_from_bench(table, csv_path);
      } else {
        series = detail::series_from_table(table, csv_path, "size");
      }
    } else {
      throw ConfigError("unknown plot kind '" + kind +
                        "' (expected reward, regret, convergence or scaling)");
    }

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(out_path + ": cannot open for writing");
    out << render_line_chart(series, spec);
    if (!out) throw IoError(out_path + ": write failed");
  });
}

inline int cmd_movielens(const MovielensOptions& options) {
  return detail::guarded([&] {
    std::string dir = options.data_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("HDCB_MOVIELENS_DIR")) dir = env;
    }
    if (dir.empty()) {
      throw ConfigError("no dataset directory: pass --data or set HDCB_MOVIELENS_DIR");
    }
    ExperimentSpec spec = load_experiment(options.common.config_path);
    detail::apply_overrides(spec.run, options.common);
    const auto out_dir = detail::prepare_out_dir(options.common.out_dir);

    const auto dataset =
        load_movielens(dir + "/u.data", dir + "/u.user", options.n_movies, options.context_dim);

    RunConfig config = spec.run;
    config.env.n_actions = dataset.n_actions;
    config.env.context_dim = dataset.context_dim;

    auto agent = make_agent(config.policy, config.env, policy_seed_for(config));
    Rng rng(mix_seed(policy_seed_for(config), hdcb::detail::kExploreStream));
    const ReplayResult result = replay_movielens(*agent, dataset, rng);

    const std::vector<std::string> header{"n_movies", "policy", "avg_reward", "matched", "events"};
    const std::vector<std::vector<std::string>> rows{
        {std::to_string(dataset.n_actions), config.policy.kind, fmt_double(result.avg_reward),
         std::to_string(result.matched), std::to_string(dataset.events.size())}};
    write_csv((out_dir / "movielens.csv").string(), header, rows);

    nlohmann::json config_j = detail::config_json(config);
    config_j["movielens"] = {{"data_dir", dir},
                             {"n_movies", options.n_movies},
                             {"context_dim", options.context_dim}};
    detail::write_manifest(out_dir, "movielens", options.common.config_path, config_j,
                           detail::seeds_json(config), {"movielens.csv"});
  });
}

}  // namespace hdcb::cli
