#pragma once

// Experiment orchestration: single online runs, multi-seed averaging with a
// small worker pool, grid search over hyperparameter lattices, convergence
// detection and per-step latency benchmarking.
//
// Seed discipline: repetition i of a config with base seed s runs its
// environment from s + i and its policy (codebook, exploration, stochastic
// updates) from s + i + 2^32, so the two streams never collide. Sub-streams
// are split off with mix_seed.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hdcb/agents.hpp"
#include "hdcb/contract.hpp"
#include "hdcb/environments.hpp"
#include "hdcb/policy.hpp"
#include "hdcb/rng.hpp"

namespace hdcb {

struct PolicyConfig {
  std::string kind = "hdcb_eps";  // hdcb_eps | hdcb_unc1 | hdcb_unc2 | hdcb_unc3 |
                                  // lineps | linucb | oracle | uniform_random
                                  // (linear kinds accept _naive / _opt suffixes)
  double epsilon = 0.1;
  double alpha = 0.5;
  double alpha2 = 0.3;
  int hv_dim = 1000;
  int q_levels = 10;
  LinearMode linear_mode = LinearMode::kShermanMorrison;
  bool unc3_thinning = false;
};

struct EnvConfig {
  RewardKind reward_kind = RewardKind::kContinuous;
  int n_actions = 20;
  int context_dim = 10;
  int horizon = 500;
  double noise_sd = 0.05;
};

struct RunConfig {
  PolicyConfig policy;
  EnvConfig env;
  std::uint64_t seed = 1;
  int repetitions = 1;
  int window = 25;
  double conv_threshold = 0.95;
  int workers = 1;
};

struct RunMetrics {
  std::vector<double> reward_trace;      // realized rewards
  std::vector<double> mu_trace;          // expected reward of the chosen arm
  std::vector<double> cum_regret_trace;  // running sum of best-arm gaps
  double avg_reward = 0.0;
  double final_regret = 0.0;
  std::optional<int> convergence_t;
  std::int64_t wall_ns_per_step = 0;  // select+update only
};

namespace detail {
inline constexpr std::uint64_t kPolicySeedOffset = 1ULL << 32;
inline constexpr std::uint64_t kCodebookStream = 0xC0DE;
inline constexpr std::uint64_t kExploreStream = 0xE4;
inline constexpr std::uint64_t kEnvStepStream = 0x5E;
}  // namespace detail

inline std::uint64_t env_seed_for(const RunConfig& config) { return config.seed; }
inline std::uint64_t policy_seed_for(const RunConfig& config) {
  return config.seed + detail::kPolicySeedOffset;
}

inline std::unique_ptr<SyntheticEnv> make_env(const EnvConfig& env, std::uint64_t seed) {
  return std::make_unique<SyntheticEnv>(env.n_actions, env.context_dim, env.reward_kind,
                                        env.noise_sd, seed);
}

inline std::unique_ptr<Agent> make_agent(const PolicyConfig& policy, const EnvConfig& env,
                                         std::uint64_t policy_seed) {
  const auto codebook = [&] {
    return build_codebook(env.context_dim, policy.hv_dim, policy.q_levels, {0.0, 1.0},
                          mix_seed(policy_seed, detail::kCodebookStream));
  };
  const RewardEncoder reward_encoder(policy.hv_dim, {0.0, 1.0});
  const std::string& kind = policy.kind;

  if (kind == "hdcb_eps") {
    return std::make_unique<HdAgent<HdEpsPolicy>>(
        kind, HdEpsPolicy(env.n_actions, policy.hv_dim, policy.epsilon), codebook(),
        reward_encoder);
  }
  if (kind == "hdcb_unc1") {
    return std::make_unique<HdAgent<HdUnc1Policy>>(
        kind, HdUnc1Policy(env.n_actions, policy.hv_dim, policy.alpha, policy.alpha2), codebook(),
        reward_encoder);
  }
  if (kind == "hdcb_unc2") {
    return std::make_unique<HdAgent<HdUnc2Policy>>(
        kind, HdUnc2Policy(env.n_actions, policy.hv_dim, policy.alpha), codebook(),
        reward_encoder);
  }
  if (kind == "hdcb_unc3") {
    return std::make_unique<HdAgent<HdUnc3Policy>>(
        kind,
        HdUnc3Policy(env.n_actions, policy.hv_dim, policy.alpha, policy.alpha2,
                     policy.unc3_thinning),
        codebook(), reward_encoder);
  }
  if (kind == "lineps" || kind == "lineps_naive" || kind == "lineps_opt") {
    LinearMode mode = policy.linear_mode;
    if (kind == "lineps_naive") mode = LinearMode::kNaive;
    if (kind == "lineps_opt") mode = LinearMode::kShermanMorrison;
    return std::make_unique<LinEpsAgent>(env.n_actions, env.context_dim, policy.epsilon, mode);
  }
  if (kind == "linucb" || kind == "linucb_naive" || kind == "linucb_opt") {
    LinearMode mode = policy.linear_mode;
    if (kind == "linucb_naive") mode = LinearMode::kNaive;
    if (kind == "linucb_opt") mode = LinearMode::kShermanMorrison;
    return std::make_unique<LinUcbAgent>(env.n_actions, env.context_dim, policy.alpha, mode);
  }
  if (kind == "oracle") return std::make_unique<OracleAgent>();
  if (kind == "uniform_random") return std::make_unique<UniformRandomAgent>();
  throw ConfigError("unknown policy kind '" + kind + "'");
}

// Smallest 1-based step at which the trailing-window average reward reaches
// threshold times the final trailing-window average.
inline std::optional<int> convergence_time(std::span<const double> reward_trace, int window,
                                           double threshold) {
  require(window >= 1, "convergence_time: window must be >= 1");
  require(threshold > 0.0 && threshold <= 1.0, "convergence_time: threshold must lie in (0,1]");
  const int horizon = static_cast<int>(reward_trace.size());
  require(window <= horizon, "convergence_time: window exceeds trace length");

  double moving_sum = 0.0;
  std::vector<double> window_mean(static_cast<std::size_t>(horizon), 0.0);
  for (int t = 0; t < horizon; ++t) {
    moving_sum += reward_trace[static_cast<std::size_t>(t)];
    if (t >= window) moving_sum -= reward_trace[static_cast<std::size_t>(t - window)];
    if (t >= window - 1) window_mean[static_cast<std::size_t>(t)] = moving_sum / window;
  }
  const double target = threshold * window_mean[static_cast<std::size_t>(horizon - 1)];
  for (int t = window - 1; t < horizon; ++t) {
    if (window_mean[static_cast<std::size_t>(t)] >= target) return t + 1;
  }
  return std::nullopt;
}

// One online run: observe -> (encode ->) select -> reward -> update. Timing
// covers select and update only; environment sampling stays outside the
// clock, context encoding happens inside the agents and is therefore billed.
inline RunMetrics run_steps(OnlineEnv& env, Agent& agent, int horizon, Rng& env_rng,
                            Rng& policy_rng, int window, double conv_threshold) {
  require(horizon >= 1, "run_steps: horizon must be >= 1");
  using clock = std::chrono::steady_clock;

  RunMetrics metrics;
  metrics.reward_trace.reserve(static_cast<std::size_t>(horizon));
  metrics.mu_trace.reserve(static_cast<std::size_t>(horizon));
  metrics.cum_regret_trace.reserve(static_cast<std::size_t>(horizon));

  std::vector<std::vector<double>> contexts;
  std::vector<double> expected;
  double cum_regret = 0.0;
  double reward_sum = 0.0;
  std::int64_t timed_ns = 0;

  for (int t = 0; t < horizon; ++t) {
    env.step(env_rng, contexts, expected);

    const auto select_start = clock::now();
    const PolicyDecision decision = agent.select({ContextView(contexts), expected}, policy_rng);
    const auto select_end = clock::now();

    const double mu = expected[static_cast<std::size_t>(decision.action)];
    const double best_mu = *std::max_element(expected.begin(), expected.end());
    const double reward = env.reward(mu, env_rng);

    const auto update_start = clock::now();
    agent.update(decision.action, contexts[static_cast<std::size_t>(decision.action)], reward,
                 policy_rng);
    const auto update_end = clock::now();

    timed_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(
                    (select_end - select_start) + (update_end - update_start))
                    .count();
    cum_regret += best_mu - mu;
    reward_sum += reward;
    metrics.reward_trace.push_back(reward);
    metrics.mu_trace.push_back(mu);
    metrics.cum_regret_trace.push_back(cum_regret);
  }

  metrics.avg_reward = reward_sum / horizon;
  metrics.final_regret = cum_regret;
  metrics.wall_ns_per_step = timed_ns / horizon;
  metrics.convergence_t =
      convergence_time(metrics.reward_trace, std::min(window, horizon), conv_threshold);
  return metrics;
}

inline RunMetrics run_online(const RunConfig& config) {
  require(config.env.horizon >= 1, "run_online: horizon must be >= 1");
  const std::uint64_t env_seed = env_seed_for(config);
  const std::uint64_t policy_seed = policy_seed_for(config);

  auto env = make_env(config.env, env_seed);
  auto agent = make_agent(config.policy, config.env, policy_seed);
  Rng env_rng(mix_seed(env_seed, detail::kEnvStepStream));
  Rng policy_rng(mix_seed(policy_seed, detail::kExploreStream));
  return run_steps(*env, *agent, config.env.horizon, env_rng, policy_rng, config.window,
                   config.conv_threshold);
}

struct AggregateMetrics {
  int repetitions = 0;
  int horizon = 0;
  int window = 0;
  std::vector<double> mean_reward_trace;
  std::vector<double> sd_reward_trace;
  std::vector<double> mean_regret_trace;
  std::vector<double> sd_regret_trace;
  std::vector<double> mean_mu_trace;
  std::vector<double> mean_best_mu_trace;  // mu of the chosen arm plus the step regret
  std::vector<double> per_run_avg_reward;
  std::vector<double> per_run_final_regret;
  double mean_avg_reward = 0.0;
  double sd_avg_reward = 0.0;
  double mean_final_regret = 0.0;
  double sd_final_regret = 0.0;
  double mean_wall_ns_per_step = 0.0;
  int converged_runs = 0;
  double mean_convergence_t = 0.0;  // over converged runs
};

namespace detail {

inline double mean_of(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

// Sample standard deviation; exactly zero for constant or singleton samples.
inline double sd_of(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace detail

inline AggregateMetrics aggregate_metrics(std::span<const RunMetrics> runs, int window) {
  require(!runs.empty(), "aggregate_metrics: no runs");
  const int horizon = static_cast<int>(runs.front().reward_trace.size());
  const int n = static_cast<int>(runs.size());

  AggregateMetrics agg;
  agg.repetitions = n;
  agg.horizon = horizon;
  agg.window = window;
  agg.mean_reward_trace.assign(static_cast<std::size_t>(horizon), 0.0);
  agg.sd_reward_trace.assign(static_cast<std::size_t>(horizon), 0.0);
  agg.mean_regret_trace.assign(static_cast<std::size_t>(horizon), 0.0);
  agg.sd_regret_trace.assign(static_cast<std::size_t>(horizon), 0.0);
  agg.mean_mu_trace.assign(static_cast<std::size_t>(horizon), 0.0);
  agg.mean_best_mu_trace.assign(static_cast<std::size_t>(horizon), 0.0);

  std::vector<double> column(static_cast<std::size_t>(n));
  for (int t = 0; t < horizon; ++t) {
    for (int r = 0; r < n; ++r) {
      column[static_cast<std::size_t>(r)] =
          runs[static_cast<std::size_t>(r)].reward_trace[static_cast<std::size_t>(t)];
    }
    const double m = detail::mean_of(column);
    agg.mean_reward_trace[static_cast<std::size_t>(t)] = m;
    agg.sd_reward_trace[static_cast<std::size_t>(t)] = detail::sd_of(column, m);

    for (int r = 0; r < n; ++r) {
      column[static_cast<std::size_t>(r)] =
          runs[static_cast<std::size_t>(r)].cum_regret_trace[static_cast<std::size_t>(t)];
    }
    const double mr = detail::mean_of(column);
    agg.mean_regret_trace[static_cast<std::size_t>(t)] = mr;
    agg.sd_regret_trace[static_cast<std::size_t>(t)] = detail::sd_of(column, mr);

    double mu_sum = 0.0;
    double best_sum = 0.0;
    for (int r = 0; r < n; ++r) {
      const auto& run = runs[static_cast<std::size_t>(r)];
      const double mu = run.mu_trace[static_cast<std::size_t>(t)];
      const double step_regret =
          run.cum_regret_trace[static_cast<std::size_t>(t)] -
          (t > 0 ? run.cum_regret_trace[static_cast<std::size_t>(t - 1)] : 0.0);
      mu_sum += mu;
      best_sum += mu + step_regret;
    }
    agg.mean_mu_trace[static_cast<std::size_t>(t)] = mu_sum / n;
    agg.mean_best_mu_trace[static_cast<std::size_t>(t)] = best_sum / n;
  }

  agg.per_run_avg_reward.reserve(static_cast<std::size_t>(n));
  agg.per_run_final_regret.reserve(static_cast<std::size_t>(n));
  double wall = 0.0;
  for (const auto& run : runs) {
    agg.per_run_avg_reward.push_back(run.avg_reward);
    agg.per_run_final_regret.push_back(run.final_regret);
    wall += static_cast<double>(run.wall_ns_per_step);
    if (run.convergence_t) {
      ++agg.converged_runs;
      agg.mean_convergence_t += static_cast<double>(*run.convergence_t);
    }
  }
  if (agg.converged_runs > 0) agg.mean_convergence_t /= agg.converged_runs;
  agg.mean_avg_reward = detail::mean_of(agg.per_run_avg_reward);
  agg.sd_avg_reward = detail::sd_of(agg.per_run_avg_reward, agg.mean_avg_reward);
  agg.mean_final_regret = detail::mean_of(agg.per_run_final_regret);
  agg.sd_final_regret = detail::sd_of(agg.per_run_final_regret, agg.mean_final_regret);
  agg.mean_wall_ns_per_step = wall / n;
  return agg;
}

inline RunConfig config_for_repetition(const RunConfig& base, int repetition) {
  RunConfig config = base;
  config.seed = base.seed + static_cast<std::uint64_t>(repetition);
  config.repetitions = 1;
  return config;
}

// R independently seeded runs. Workers write into per-repetition slots and a
// serial reduction aggregates in index order, so worker count never changes
// the result.
inline AggregateMetrics average_runs(const RunConfig& config) {
  require(config.repetitions >= 1, "average_runs: repetitions must be >= 1");
  const int reps = config.repetitions;
  std::vector<RunMetrics> runs(static_cast<std::size_t>(reps));

  const int workers = std::clamp(config.workers, 1, reps);
  if (workers == 1) {
    for (int i = 0; i < reps; ++i) {
      runs[static_cast<std::size_t>(i)] = run_online(config_for_repetition(config, i));
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= reps) return;
          try {
            runs[static_cast<std::size_t>(i)] = run_online(config_for_repetition(config, i));
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  return aggregate_metrics(runs, std::min(config.window, config.env.horizon));
}

// Applies a named hyperparameter; the set of names doubles as the sweep
// schema in config files.
inline void set_param(RunConfig& config, const std::string& name, double value) {
  if (name == "epsilon") {
    config.policy.epsilon = value;
  } else if (name == "alpha") {
    config.policy.alpha = value;
  } else if (name == "alpha2") {
    config.policy.alpha2 = value;
  } else if (name == "hv_dim") {
    config.policy.hv_dim = static_cast<int>(value);
  } else if (name == "q_levels") {
    config.policy.q_levels = static_cast<int>(value);
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "'");
  }
}

struct GridAxis {
  std::string param;
  std::vector<double> values;
};

struct LeaderboardRow {
  std::vector<std::pair<std::string, double>> params;  // in axis order
  double mean_reward = 0.0;
  double sd_reward = 0.0;
  double mean_final_regret = 0.0;
};

struct GridSearchResult {
  RunConfig best;
  int best_index = 0;
  std::vector<LeaderboardRow> leaderboard;  // in lattice order
};

// Exhaustive cartesian sweep in row-major lattice order (last axis fastest);
// the winner maximizes mean reward, ties keep the earliest lattice point.
inline GridSearchResult grid_search(const RunConfig& base, std::span<const GridAxis> axes) {
  require(!axes.empty(), "grid_search: empty lattice");
  for (const auto& axis : axes) {
    require(!axis.values.empty(), "grid_search: axis '" + axis.param + "' has no values");
  }

  GridSearchResult result;
  result.best = base;
  double best_reward = 0.0;
  std::vector<std::size_t> odo(axes.size(), 0);
  bool done = false;
  int index = 0;
  while (!done) {
    RunConfig point = base;
    LeaderboardRow row;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const double value = axes[i].values[odo[i]];
      set_param(point, axes[i].param, value);
      row.params.emplace_back(axes[i].param, value);
    }
    const AggregateMetrics agg = average_runs(point);
    row.mean_reward = agg.mean_avg_reward;
    row.sd_reward = agg.sd_avg_reward;
    row.mean_final_regret = agg.mean_final_regret;
    result.leaderboard.push_back(std::move(row));

    if (index == 0 || agg.mean_avg_reward > best_reward) {
      best_reward = agg.mean_avg_reward;
      result.best = point;
      result.best_index = index;
    }
    ++index;

    // advance the odometer, last axis fastest
    done = true;
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++odo[i] < axes[i].values.size()) {
        done = false;
        break;
      }
      odo[i] = 0;
    }
  }
  return result;
}

struct BenchRow {
  std::string policy;
  std::string size_kind;  // context_dim | hv_dim
  int size = 0;
  std::int64_t ns_per_step_median = 0;
  std::int64_t ns_per_step_p90 = 0;
};

// Median/p90 per-step latency (select + update) over `steps` timed steps per
// size after a short warmup; environment sampling stays off the clock.
inline std::vector<BenchRow> bench_step_time(const RunConfig& base,
                                             std::span<const std::string> policies,
                                             const std::string& size_kind,
                                             std::span<const int> sizes, int steps) {
  require(!policies.empty(), "bench_step_time: no policies");
  require(!sizes.empty(), "bench_step_time: no sizes");
  require(std::is_sorted(sizes.begin(), sizes.end()), "bench_step_time: sizes must be ascending");
  require(size_kind == "context_dim" || size_kind == "hv_dim",
          "bench_step_time: size_kind must be context_dim or hv_dim");
  require(steps >= 1, "bench_step_time: steps must be >= 1");
  using clock = std::chrono::steady_clock;

  std::vector<BenchRow> rows;
  for (const auto& policy_kind : policies) {
    for (int size : sizes) {
      RunConfig config = base;
      config.policy.kind = policy_kind;
      if (size_kind == "context_dim") {
        config.env.context_dim = size;
      } else {
        config.policy.hv_dim = size;
      }

      auto env = make_env(config.env, env_seed_for(config));
      auto agent = make_agent(config.policy, config.env, policy_seed_for(config));
      Rng env_rng(mix_seed(env_seed_for(config), detail::kEnvStepStream));
      Rng policy_rng(mix_seed(policy_seed_for(config), detail::kExploreStream));

      std::vector<std::vector<double>> contexts;
      std::vector<double> expected;
      const int warmup = std::max(32, steps / 10);
      for (int t = 0; t < warmup; ++t) {
        env->step(env_rng, contexts, expected);
        const auto decision = agent->select({ContextView(contexts), expected}, policy_rng);
        const double reward =
            env->reward(expected[static_cast<std::size_t>(decision.action)], env_rng);
        agent->update(decision.action, contexts[static_cast<std::size_t>(decision.action)],
                      reward, policy_rng);
      }

      std::vector<std::int64_t> samples;
      samples.reserve(static_cast<std::size_t>(steps));
      for (int t = 0; t < steps; ++t) {
        env->step(env_rng, contexts, expected);
        const auto select_start = clock::now();
        const auto decision = agent->select({ContextView(contexts), expected}, policy_rng);
        const auto select_end = clock::now();
        const double reward =
            env->reward(expected[static_cast<std::size_t>(decision.action)], env_rng);
        const auto update_start = clock::now();
        agent->update(decision.action, contexts[static_cast<std::size_t>(decision.action)],
                      reward, policy_rng);
        const auto update_end = clock::now();
        samples.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(
                              (select_end - select_start) + (update_end - update_start))
                              .count());
      }
      std::sort(samples.begin(), samples.end());
      BenchRow row;
      row.policy = policy_kind;
      row.size_kind = size_kind;
      row.size = size;
      row.ns_per_step_median = samples[samples.size() / 2];
      row.ns_per_step_p90 = samples[static_cast<std::size_t>(
          std::min<double>(static_cast<double>(samples.size()) - 1.0,
                           std::floor(0.9 * static_cast<double>(samples.size()))))];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace hdcb
