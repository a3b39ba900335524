#pragma once

// Flat key-value experiment configuration. Four sections are recognized:
//
//   [policy]       kind plus hyperparameters (epsilon, alpha, alpha2, hv_dim,
//                  q_levels, linear_mode, unc3_thinning)
//   [environment]  kind (continuous|binary), n_actions, context_dim, horizon,
//                  noise_sd
//   [sweep]        hyperparameter lattices (one axis per key, values comma
//                  separated, file order = lattice order) and bench_* keys
//   [output]       seed, repetitions, workers, window, threshold
//
// '#' starts a comment; keys are validated strictly so typos fail fast.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdcb/contract.hpp"
#include "hdcb/csv.hpp"
#include "hdcb/harness.hpp"

namespace hdcb {

struct ConfigFile {
  // section -> ordered (key, value) pairs; order drives lattice order
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

  const std::vector<std::pair<std::string, std::string>>* section(const std::string& name) const {
    for (const auto& [sec, entries] : sections) {
      if (sec == name) return &entries;
    }
    return nullptr;
  }

  std::optional<std::string> get(const std::string& sec, const std::string& key) const {
    const auto* entries = section(sec);
    if (!entries) return std::nullopt;
    for (const auto& [k, v] : *entries) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double to_double(const std::string& value, const std::string& where) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(where + ": expected a number, got '" + value + "'");
  }
  return out;
}

inline long to_long(const std::string& value, const std::string& where) {
  long out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(where + ": expected an integer, got '" + value + "'");
  }
  return out;
}

inline bool to_bool(const std::string& value, const std::string& where) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(where + ": expected true or false, got '" + value + "'");
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  for (char c : value) {
    if (c == ',') {
      out.push_back(trim(item));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  out.push_back(trim(item));
  out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
  return out;
}

}  // namespace detail

inline ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");

  ConfigFile file;
  std::string line;
  std::size_t line_no = 0;
  std::string current;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError(path + " line " + std::to_string(line_no) + ": unterminated section");
      }
      current = detail::trim(text.substr(1, text.size() - 2));
      file.sections.emplace_back(current, std::vector<std::pair<std::string, std::string>>{});
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + " line " + std::to_string(line_no) + ": expected key = value");
    }
    if (current.empty()) {
      throw ConfigError(path + " line " + std::to_string(line_no) + ": key outside any section");
    }
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(path + " line " + std::to_string(line_no) + ": empty key or value");
    }
    file.sections.back().second.emplace_back(key, value);
  }
  return file;
}

struct BenchSpec {
  std::vector<std::string> policies;
  std::string size_kind;
  std::vector<int> sizes;
  int steps = 2000;

  bool configured() const { return !policies.empty(); }
};

struct ExperimentSpec {
  RunConfig run;
  std::vector<GridAxis> sweep_axes;
  BenchSpec bench;
};

// Validates sections/keys strictly and materializes the resolved RunConfig.
inline ExperimentSpec load_experiment(const std::string& path) {
  const ConfigFile file = parse_config_file(path);
  ExperimentSpec spec;

  for (const auto& [section, entries] : file.sections) {
    if (section == "policy") {
      for (const auto& [key, value] : entries) {
        const std::string where = path + " [policy] " + key;
        if (key == "kind") {
          spec.run.policy.kind = value;
        } else if (key == "epsilon") {
          spec.run.policy.epsilon = detail::to_double(value, where);
        } else if (key == "alpha") {
          spec.run.policy.alpha = detail::to_double(value, where);
        } else if (key == "alpha2") {
          spec.run.policy.alpha2 = detail::to_double(value, where);
        } else if (key == "hv_dim") {
          spec.run.policy.hv_dim = static_cast<int>(detail::to_long(value, where));
        } else if (key == "q_levels") {
          spec.run.policy.q_levels = static_cast<int>(detail::to_long(value, where));
        } else if (key == "linear_mode") {
          if (value == "naive") {
            spec.run.policy.linear_mode = LinearMode::kNaive;
          } else if (value == "sherman_morrison") {
            spec.run.policy.linear_mode = LinearMode::kShermanMorrison;
          } else {
            throw ConfigError(where + ": expected naive or sherman_morrison");
          }
        } else if (key == "unc3_thinning") {
          spec.run.policy.unc3_thinning = detail::to_bool(value, where);
        } else {
          throw ConfigError(where + ": unknown key");
        }
      }
    } else if (section == "environment") {
      for (const auto& [key, value] : entries) {
        const std::string where = path + " [environment] " + key;
        if (key == "kind") {
          if (value == "continuous") {
            spec.run.env.reward_kind = RewardKind::kContinuous;
          } else if (value == "binary") {
            spec.run.env.reward_kind = RewardKind::kBinary;
          } else {
            throw ConfigError(where + ": expected continuous or binary");
          }
        } else if (key == "n_actions") {
          spec.run.env.n_actions = static_cast<int>(detail::to_long(value, where));
        } else if (key == "context_dim") {
          spec.run.env.context_dim = static_cast<int>(detail::to_long(value, where));
        } else if (key == "horizon") {
          spec.run.env.horizon = static_cast<int>(detail::to_long(value, where));
        } else if (key == "noise_sd") {
          spec.run.env.noise_sd = detail::to_double(value, where);
        } else {
          throw ConfigError(where + ": unknown key");
        }
      }
    } else if (section == "sweep") {
      for (const auto& [key, value] : entries) {
        const std::string where = path + " [sweep] " + key;
        if (key == "bench_policies") {
          spec.bench.policies = detail::split_list(value);
        } else if (key == "bench_size_kind") {
          spec.bench.size_kind = value;
        } else if (key == "bench_sizes") {
          for (const auto& item : detail::split_list(value)) {
            spec.bench.sizes.push_back(static_cast<int>(detail::to_long(item, where)));
          }
        } else if (key == "bench_steps") {
          spec.bench.steps = static_cast<int>(detail::to_long(value, where));
        } else {
          GridAxis axis;
          axis.param = key;
          for (const auto& item : detail::split_list(value)) {
            axis.values.push_back(detail::to_double(item, where));
          }
          if (axis.values.empty()) throw ConfigError(where + ": empty value list");
          spec.sweep_axes.push_back(std::move(axis));
        }
      }
    } else if (section == "output") {
      for (const auto& [key, value] : entries) {
        const std::string where = path + " [output] " + key;
        if (key == "seed") {
          spec.run.seed = static_cast<std::uint64_t>(detail::to_long(value, where));
        } else if (key == "repetitions") {
          spec.run.repetitions = static_cast<int>(detail::to_long(value, where));
        } else if (key == "workers") {
          spec.run.workers = static_cast<int>(detail::to_long(value, where));
        } else if (key == "window") {
          spec.run.window = static_cast<int>(detail::to_long(value, where));
        } else if (key == "threshold") {
          spec.run.conv_threshold = detail::to_double(value, where);
        } else {
          throw ConfigError(where + ": unknown key");
        }
      }
    } else {
      throw ConfigError(path + ": unknown section [" + section + "]");
    }
  }

  // cross-field validation; sweep parameter names are vetted by set_param
  if (spec.run.env.n_actions < 1) throw ConfigError(path + ": n_actions must be >= 1");
  if (spec.run.env.context_dim < 1) throw ConfigError(path + ": context_dim must be >= 1");
  if (spec.run.env.horizon < 1) throw ConfigError(path + ": horizon must be >= 1");
  if (spec.run.env.noise_sd < 0) throw ConfigError(path + ": noise_sd must be >= 0");
  if (spec.run.policy.hv_dim < 2) throw ConfigError(path + ": hv_dim must be >= 2");
  if (spec.run.policy.q_levels < 2) throw ConfigError(path + ": q_levels must be >= 2");
  if (spec.run.policy.epsilon < 0 || spec.run.policy.epsilon > 1) {
    throw ConfigError(path + ": epsilon must lie in [0,1]");
  }
  if (spec.run.policy.alpha < 0) throw ConfigError(path + ": alpha must be >= 0");
  if (spec.run.policy.alpha2 < 0 || spec.run.policy.alpha2 > 1) {
    throw ConfigError(path + ": alpha2 must lie in [0,1]");
  }
  if (spec.run.repetitions < 1) throw ConfigError(path + ": repetitions must be >= 1");
  if (spec.run.window < 1) throw ConfigError(path + ": window must be >= 1");
  if (spec.run.conv_threshold <= 0 || spec.run.conv_threshold > 1) {
    throw ConfigError(path + ": threshold must lie in (0,1]");
  }
  if (spec.run.workers < 1) throw ConfigError(path + ": workers must be >= 1");
  for (const auto& axis : spec.sweep_axes) {
    RunConfig probe = spec.run;
    set_param(probe, axis.param, axis.values.front());
  }
  if (spec.bench.configured()) {
    if (spec.bench.size_kind != "context_dim" && spec.bench.size_kind != "hv_dim") {
      throw ConfigError(path + ": bench_size_kind must be context_dim or hv_dim");
    }
    if (spec.bench.sizes.empty()) throw ConfigError(path + ": bench_sizes is empty");
    if (spec.bench.steps < 1) throw ConfigError(path + ": bench_steps must be >= 1");
  }
  return spec;
}

// Serializes a resolved RunConfig back into the config syntax (best.config).
inline void write_run_config(const std::string& path, const RunConfig& config) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "[policy]\n";
  out << "kind = " << config.policy.kind << "\n";
  out << "epsilon = " << fmt_double(config.policy.epsilon, 17) << "\n";
  out << "alpha = " << fmt_double(config.policy.alpha, 17) << "\n";
  out << "alpha2 = " << fmt_double(config.policy.alpha2, 17) << "\n";
  out << "hv_dim = " << config.policy.hv_dim << "\n";
  out << "q_levels = " << config.policy.q_levels << "\n";
  out << "linear_mode = "
      << (config.policy.linear_mode == LinearMode::kNaive ? "naive" : "sherman_morrison") << "\n";
  out << "unc3_thinning = " << (config.policy.unc3_thinning ? "true" : "false") << "\n";
  out << "\n[environment]\n";
  out << "kind = " << to_string(config.env.reward_kind) << "\n";
  out << "n_actions = " << config.env.n_actions << "\n";
  out << "context_dim = " << config.env.context_dim << "\n";
  out << "horizon = " << config.env.horizon << "\n";
  out << "noise_sd = " << fmt_double(config.env.noise_sd, 17) << "\n";
  out << "\n[output]\n";
  out << "seed = " << config.seed << "\n";
  out << "repetitions = " << config.repetitions << "\n";
  out << "workers = " << config.workers << "\n";
  out << "window = " << config.window << "\n";
  out << "threshold = " << fmt_double(config.conv_threshold, 17) << "\n";
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace hdcb
