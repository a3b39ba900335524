#pragma once

// Reward-generating worlds.
//
// SyntheticEnv draws one fresh context per arm each round from [0,1]^d and
// scores it against a fixed unit-norm weight vector per arm. The continuous
// law maps the normalized dot product into [0,1] and adds clamped Gaussian
// noise; the binary law passes the raw dot product through a logistic link
// whose offset is calibrated at construction so the average success rate is
// near one half.
//
// Logged-feedback tooling generates uniformly-logged records from a synthetic
// environment, serializes them to CSV, and evaluates an arbitrary agent by
// replay: only rounds where the agent picks the logged action are credited
// and only those rounds update the agent.
//
// The MovieLens loader ingests the 100k ratings format (u.data / u.user),
// keeps the most-rated movies as arms, and replays events in timestamp order
// with a shared per-user context.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hdcb/contract.hpp"
#include "hdcb/csv.hpp"
#include "hdcb/policy.hpp"
#include "hdcb/rng.hpp"

namespace hdcb {

enum class RewardKind { kContinuous, kBinary };

inline std::string to_string(RewardKind kind) {
  return kind == RewardKind::kContinuous ? "continuous" : "binary";
}

class OnlineEnv {
 public:
  virtual ~OnlineEnv() = default;

  virtual int n_actions() const = 0;
  virtual int context_dim() const = 0;

  // Fill per-arm contexts and their expected rewards for one round.
  virtual void step(Rng& rng, std::vector<std::vector<double>>& contexts,
                    std::vector<double>& expected_rewards) = 0;

  // Draw a realized reward for an arm with expected reward mu.
  virtual double reward(double mu, Rng& rng) = 0;
};

class SyntheticEnv final : public OnlineEnv {
 public:
  SyntheticEnv(int n_actions, int context_dim, RewardKind kind, double noise_sd,
               std::uint64_t seed)
      : n_(n_actions), d_(context_dim), kind_(kind), noise_sd_(noise_sd), seed_(seed) {
    require(n_actions >= 1, "SyntheticEnv: need at least one action");
    require(context_dim >= 1, "SyntheticEnv: need at least one feature");
    require(noise_sd >= 0.0, "SyntheticEnv: noise_sd must be >= 0");

    Rng weight_rng(mix_seed(seed, 0x77));
    weights_.resize(static_cast<std::size_t>(n_actions));
    for (auto& w : weights_) {
      w.resize(static_cast<std::size_t>(context_dim));
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (auto& v : w) {
          v = weight_rng.normal(0.0, 1.0);
          n2 += v * v;
        }
      } while (n2 == 0.0);
      const double inv_norm = 1.0 / std::sqrt(n2);
      for (auto& v : w) v *= inv_norm;
    }

    if (kind_ == RewardKind::kBinary) {
      // Offset the logistic link by the average raw score so successes and
      // failures stay balanced across environments.
      Rng calib_rng(mix_seed(seed, 0xCA));
      const int kSamples = 512;
      double acc = 0.0;
      std::vector<double> x(static_cast<std::size_t>(context_dim));
      for (int s = 0; s < kSamples; ++s) {
        for (auto& v : x) v = calib_rng.uniform01();
        acc += raw_score(s % n_actions, x);
      }
      mean_offset_ = acc / kSamples;
    }
  }

  int n_actions() const override { return n_; }
  int context_dim() const override { return d_; }
  RewardKind reward_kind() const { return kind_; }
  double noise_sd() const { return noise_sd_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }

  double expected_reward(int action, std::span<const double> x) const {
    if (kind_ == RewardKind::kContinuous) {
      double n2 = 0.0;
      for (double v : x) n2 += v * v;
      if (n2 == 0.0) return 0.5;
      const double cosine_like = raw_score(action, x) / std::sqrt(n2);
      return std::clamp(0.5 + 0.5 * cosine_like, 0.0, 1.0);
    }
    const double z = 3.0 * (raw_score(action, x) - mean_offset_);
    return 1.0 / (1.0 + std::exp(-z));
  }

  void step(Rng& rng, std::vector<std::vector<double>>& contexts,
            std::vector<double>& expected_rewards) override {
    contexts.resize(static_cast<std::size_t>(n_));
    expected_rewards.resize(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a) {
      auto& x = contexts[static_cast<std::size_t>(a)];
      x.resize(static_cast<std::size_t>(d_));
      for (auto& v : x) v = rng.uniform01();
      expected_rewards[static_cast<std::size_t>(a)] = expected_reward(a, x);
    }
  }

  double reward(double mu, Rng& rng) override {
    if (kind_ == RewardKind::kContinuous) {
      return std::clamp(mu + rng.normal(0.0, noise_sd_), 0.0, 1.0);
    }
    return rng.bernoulli(mu) ? 1.0 : 0.0;
  }

 private:
  double raw_score(int action, std::span<const double> x) const {
    const auto& w = weights_[static_cast<std::size_t>(action)];
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
    return acc;
  }

  int n_;
  int d_;
  RewardKind kind_;
  double noise_sd_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> weights_;
  double mean_offset_ = 0.0;
};

struct LoggedRecord {
  std::vector<std::vector<double>> contexts;  // one row per arm
  int logged_action = 0;
  double logged_reward = 0.0;
  std::vector<double> expected_rewards;  // ground truth, kept for regret studies
};

enum class BehaviorPolicy { kUniformRandom };

// T rounds logged under the uniform behavior policy (known propensity 1/N).
inline std::vector<LoggedRecord> generate_log(SyntheticEnv& env, int horizon, Rng& rng,
                                              BehaviorPolicy behavior = BehaviorPolicy::kUniformRandom) {
  require(horizon >= 1, "generate_log: horizon must be >= 1");
  (void)behavior;  // single behavior policy today
  std::vector<LoggedRecord> log;
  log.reserve(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    LoggedRecord rec;
    env.step(rng, rec.contexts, rec.expected_rewards);
    rec.logged_action = rng.uniform_int(env.n_actions());
    rec.logged_reward =
        env.reward(rec.expected_rewards[static_cast<std::size_t>(rec.logged_action)], rng);
    log.push_back(std::move(rec));
  }
  return log;
}

struct ReplayResult {
  double avg_reward = 0.0;
  long matched = 0;
};

// Offline evaluation by replay: iterate the log in order; when the agent's
// choice matches the logged action, credit the logged reward and let the
// agent update, otherwise skip the round entirely.
inline ReplayResult replay_evaluate(Agent& agent, std::span<const LoggedRecord> log, Rng& rng) {
  require(!log.empty(), "replay_evaluate: empty log");
  double total = 0.0;
  long matched = 0;
  for (const auto& rec : log) {
    const StepView view{ContextView(rec.contexts), rec.expected_rewards};
    const PolicyDecision decision = agent.select(view, rng);
    if (decision.action == rec.logged_action) {
      total += rec.logged_reward;
      ++matched;
      agent.update(decision.action, rec.contexts[static_cast<std::size_t>(decision.action)],
                   rec.logged_reward, rng);
    }
  }
  if (matched == 0) throw NumericError("replay_evaluate: no matched rounds, average undefined");
  return {total / static_cast<double>(matched), matched};
}

// Logged datasets round-trip through CSV with the layout:
//   context_0..context_{d-1} repeated per arm, action, reward, mu_0..mu_{N-1}
inline void write_log_csv(const std::string& path, std::span<const LoggedRecord> log) {
  require(!log.empty(), "write_log_csv: empty log");
  const int n = static_cast<int>(log.front().contexts.size());
  const int d = static_cast<int>(log.front().contexts.front().size());

  std::vector<std::string> header;
  for (int a = 0; a < n; ++a) {
    for (int f = 0; f < d; ++f) header.push_back("context_" + std::to_string(f));
  }
  header.emplace_back("action");
  header.emplace_back("reward");
  for (int a = 0; a < n; ++a) header.push_back("mu_" + std::to_string(a));

  std::vector<std::vector<std::string>> rows;
  rows.reserve(log.size());
  for (const auto& rec : log) {
    std::vector<std::string> row;
    row.reserve(header.size());
    for (const auto& ctx : rec.contexts) {
      for (double v : ctx) row.push_back(fmt_double(v, 17));
    }
    row.push_back(std::to_string(rec.logged_action));
    row.push_back(fmt_double(rec.logged_reward, 17));
    for (double mu : rec.expected_rewards) row.push_back(fmt_double(mu, 17));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

inline std::vector<LoggedRecord> read_log_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.rows.empty()) throw IoError(path + ": logged dataset has no rows");

  int action_col = -1;
  int n = 0;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "action") action_col = static_cast<int>(i);
    if (table.header[i].rfind("mu_", 0) == 0) ++n;
  }
  if (action_col <= 0 || n == 0 || action_col % n != 0) {
    throw IoError(path + ": not a logged-dataset CSV");
  }
  const int d = action_col / n;

  std::vector<LoggedRecord> log;
  log.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    LoggedRecord rec;
    rec.contexts.resize(static_cast<std::size_t>(n));
    std::size_t col = 0;
    for (int a = 0; a < n; ++a) {
      auto& ctx = rec.contexts[static_cast<std::size_t>(a)];
      ctx.resize(static_cast<std::size_t>(d));
      for (int f = 0; f < d; ++f) ctx[static_cast<std::size_t>(f)] = parse_double(row[col++], path, r + 2);
    }
    rec.logged_action = static_cast<int>(parse_double(row[col++], path, r + 2));
    rec.logged_reward = parse_double(row[col++], path, r + 2);
    rec.expected_rewards.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      rec.expected_rewards[static_cast<std::size_t>(a)] = parse_double(row[col++], path, r + 2);
    }
    log.push_back(std::move(rec));
  }
  return log;
}

struct MovielensEvent {
  std::vector<double> user_features;  // all components in [0,1]
  int movie_id = 0;                   // original dataset id
  int reward = 0;                     // 1 iff the rating was 4 or 5
  long timestamp = 0;
};

struct MovielensDataset {
  std::vector<MovielensEvent> events;  // sorted by timestamp
  int n_actions = 0;
  int context_dim = 0;
  std::unordered_map<int, int> arm_of_movie;  // original id -> arm index
  long total_ratings_parsed = 0;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) out.push_back(field);
  return out;
}

inline long parse_long_field(const std::string& field, const std::string& path, long line_no) {
  try {
    std::size_t used = 0;
    const long value = std::stol(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw IoError(path + " line " + std::to_string(line_no) + ": expected integer, got '" +
                  field + "'");
  }
}

}  // namespace detail

// data_path: u.data rows "user\titem\trating\ttimestamp".
// user_path: u.user rows "id|age|gender|occupation|zip".
// Keeps only events whose movie is among the n_movies most-rated ones
// (ties broken toward the lower movie id). User features are
// [age/100, gender, occupation one-hot folded modulo context_dim - 2].
inline MovielensDataset load_movielens(const std::string& data_path, const std::string& user_path,
                                       int n_movies, int context_dim) {
  require(n_movies >= 1, "load_movielens: need at least one movie");
  require(context_dim >= 3, "load_movielens: context_dim must be >= 3");

  std::ifstream user_file(user_path);
  if (!user_file) throw IoError(user_path + ": cannot open");

  struct UserRow {
    double age;
    double gender;
    std::string occupation;
  };
  std::unordered_map<int, UserRow> users;
  std::vector<std::string> occupations;
  {
    std::string line;
    long line_no = 0;
    while (std::getline(user_file, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = detail::split(line, '|');
      if (fields.size() < 4) {
        throw IoError(user_path + " line " + std::to_string(line_no) +
                      ": expected at least 4 pipe-separated fields");
      }
      const int id = static_cast<int>(detail::parse_long_field(fields[0], user_path, line_no));
      const long age = detail::parse_long_field(fields[1], user_path, line_no);
      const double gender = fields[2] == "F" ? 1.0 : 0.0;
      users[id] = UserRow{std::clamp(static_cast<double>(age) / 100.0, 0.0, 1.0), gender,
                          fields[3]};
      occupations.push_back(fields[3]);
    }
  }
  std::sort(occupations.begin(), occupations.end());
  occupations.erase(std::unique(occupations.begin(), occupations.end()), occupations.end());
  std::unordered_map<std::string, int> occupation_index;
  for (std::size_t i = 0; i < occupations.size(); ++i) {
    occupation_index[occupations[i]] = static_cast<int>(i);
  }

  std::ifstream data_file(data_path);
  if (!data_file) throw IoError(data_path + ": cannot open");

  struct RawEvent {
    int user;
    int movie;
    int rating;
    long timestamp;
  };
  std::vector<RawEvent> raw;
  std::unordered_map<int, long> rating_counts;
  {
    std::string line;
    long line_no = 0;
    while (std::getline(data_file, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 4) {
        throw IoError(data_path + " line " + std::to_string(line_no) +
                      ": expected 4 tab-separated fields");
      }
      RawEvent ev;
      ev.user = static_cast<int>(detail::parse_long_field(fields[0], data_path, line_no));
      ev.movie = static_cast<int>(detail::parse_long_field(fields[1], data_path, line_no));
      ev.rating = static_cast<int>(detail::parse_long_field(fields[2], data_path, line_no));
      ev.timestamp = detail::parse_long_field(fields[3], data_path, line_no);
      if (users.find(ev.user) == users.end()) {
        throw IoError(data_path + " line " + std::to_string(line_no) + ": unknown user id " +
                      std::to_string(ev.user));
      }
      raw.push_back(ev);
      ++rating_counts[ev.movie];
    }
  }
  if (raw.empty()) throw IoError(data_path + ": no ratings found");

  std::vector<std::pair<int, long>> by_count(rating_counts.begin(), rating_counts.end());
  std::sort(by_count.begin(), by_count.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const int kept = std::min<int>(n_movies, static_cast<int>(by_count.size()));

  MovielensDataset ds;
  ds.total_ratings_parsed = static_cast<long>(raw.size());
  ds.n_actions = kept;
  ds.context_dim = context_dim;
  for (int i = 0; i < kept; ++i) ds.arm_of_movie[by_count[static_cast<std::size_t>(i)].first] = i;

  const int occupation_buckets = context_dim - 2;
  for (const auto& ev : raw) {
    if (ds.arm_of_movie.find(ev.movie) == ds.arm_of_movie.end()) continue;
    const auto& user = users.at(ev.user);
    MovielensEvent out;
    out.user_features.assign(static_cast<std::size_t>(context_dim), 0.0);
    out.user_features[0] = user.age;
    out.user_features[1] = user.gender;
    const int bucket = occupation_index.at(user.occupation) % occupation_buckets;
    out.user_features[static_cast<std::size_t>(2 + bucket)] = 1.0;
    out.movie_id = ev.movie;
    out.reward = ev.rating >= 4 ? 1 : 0;
    out.timestamp = ev.timestamp;
    ds.events.push_back(std::move(out));
  }
  std::stable_sort(ds.events.begin(), ds.events.end(),
                   [](const MovielensEvent& a, const MovielensEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  return ds;
}

// Replay over the MovieLens stream: every arm shares the user's context.
inline ReplayResult replay_movielens(Agent& agent, const MovielensDataset& ds, Rng& rng) {
  require(!ds.events.empty(), "replay_movielens: no events");
  double total = 0.0;
  long matched = 0;
  for (const auto& ev : ds.events) {
    const StepView view{ContextView::shared_row(ev.user_features, ds.n_actions), {}};
    const PolicyDecision decision = agent.select(view, rng);
    if (decision.action == ds.arm_of_movie.at(ev.movie_id)) {
      total += ev.reward;
      ++matched;
      agent.update(decision.action, ev.user_features, ev.reward, rng);
    }
  }
  if (matched == 0) throw NumericError("replay_movielens: no matched rounds, average undefined");
  return {total / static_cast<double>(matched), matched};
}

}  // namespace hdcb
