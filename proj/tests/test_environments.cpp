#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hdcb/agents.hpp"
#include "hdcb/environments.hpp"

namespace {

namespace fs = std::filesystem;

using hdcb::Agent;
using hdcb::generate_log;
using hdcb::LoggedRecord;
using hdcb::MovielensDataset;
using hdcb::PolicyDecision;
using hdcb::replay_evaluate;
using hdcb::RewardKind;
using hdcb::Rng;
using hdcb::StepView;
using hdcb::SyntheticEnv;

// Picks a fixed arm forever.
class FixedArmAgent final : public Agent {
 public:
  explicit FixedArmAgent(int arm) : arm_(arm) {}
  PolicyDecision select(const StepView& step, Rng&) override {
    PolicyDecision d;
    d.scores.assign(static_cast<size_t>(step.contexts.n_actions()), 0.0);
    d.action = arm_;
    return d;
  }
  void update(int, const std::vector<double>&, double, Rng&) override {}
  std::string name() const override { return "fixed"; }

 private:
  int arm_;
};

// Replays a prescribed action sequence (test-only, mirrors the logged arms).
class ScriptedAgent final : public Agent {
 public:
  explicit ScriptedAgent(std::vector<int> script) : script_(std::move(script)) {}
  PolicyDecision select(const StepView&, Rng&) override {
    PolicyDecision d;
    d.action = script_[static_cast<size_t>(next_++ % script_.size())];
    d.scores = {0.0};
    return d;
  }
  void update(int, const std::vector<double>&, double, Rng&) override {}
  std::string name() const override { return "scripted"; }

 private:
  std::vector<int> script_;
  std::size_t next_ = 0;
};

TEST(SyntheticEnv, DeterministicStreams) {
  SyntheticEnv env_a(5, 4, RewardKind::kContinuous, 0.05, 123);
  SyntheticEnv env_b(5, 4, RewardKind::kContinuous, 0.05, 123);
  Rng rng_a(9);
  Rng rng_b(9);
  std::vector<std::vector<double>> ctx_a, ctx_b;
  std::vector<double> mu_a, mu_b;
  for (int t = 0; t < 20; ++t) {
    env_a.step(rng_a, ctx_a, mu_a);
    env_b.step(rng_b, ctx_b, mu_b);
    EXPECT_EQ(ctx_a, ctx_b);
    EXPECT_EQ(mu_a, mu_b);
  }
}

TEST(SyntheticEnv, WeightsAreUnitNorm) {
  SyntheticEnv env(8, 10, RewardKind::kBinary, 0.0, 7);
  for (const auto& w : env.weights()) {
    const double n2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    EXPECT_NEAR(n2, 1.0, 1e-9);
  }
}

TEST(SyntheticEnv, ExpectedRewardsStayInUnitInterval) {
  for (auto kind : {RewardKind::kContinuous, RewardKind::kBinary}) {
    SyntheticEnv env(6, 3, kind, 0.1, 99);
    Rng rng(10);
    std::vector<std::vector<double>> ctx;
    std::vector<double> mu;
    for (int t = 0; t < 200; ++t) {
      env.step(rng, ctx, mu);
      for (double m : mu) {
        EXPECT_GE(m, 0.0);
        EXPECT_LE(m, 1.0);
      }
    }
  }
}

TEST(SyntheticEnv, NoiselessRewardEqualsMean) {
  SyntheticEnv env(3, 2, RewardKind::kContinuous, 0.0, 5);
  Rng rng(11);
  EXPECT_DOUBLE_EQ(env.reward(0.37, rng), 0.37);
}

TEST(SyntheticEnv, BinaryCertainRewards) {
  SyntheticEnv env(3, 2, RewardKind::kBinary, 0.0, 5);
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    EXPECT_DOUBLE_EQ(env.reward(1.0, rng), 1.0);
    EXPECT_DOUBLE_EQ(env.reward(0.0, rng), 0.0);
  }
}

TEST(SyntheticEnv, BinaryFrequencyMatchesMean) {
  SyntheticEnv env(3, 2, RewardKind::kBinary, 0.0, 5);
  Rng rng(13);
  const int kDraws = 100000;
  double total = 0.0;
  for (int t = 0; t < kDraws; ++t) total += env.reward(0.7, rng);
  EXPECT_NEAR(total / kDraws, 0.7, 0.005);
}

// The calibrated logistic offset keeps binary environments near balance.
TEST(SyntheticEnv, BinaryMeanNearHalf) {
  double grand = 0.0;
  const int kEnvs = 20;
  for (int e = 0; e < kEnvs; ++e) {
    SyntheticEnv env(10, 5, RewardKind::kBinary, 0.0, 1000 + static_cast<unsigned>(e));
    Rng rng(50 + e);
    std::vector<std::vector<double>> ctx;
    std::vector<double> mu;
    double acc = 0.0;
    int count = 0;
    for (int t = 0; t < 200; ++t) {
      env.step(rng, ctx, mu);
      for (double m : mu) acc += m;
      count += static_cast<int>(mu.size());
    }
    grand += acc / count;
  }
  EXPECT_NEAR(grand / kEnvs, 0.5, 0.05);
}

TEST(GenerateLog, UniformActionFrequencies) {
  SyntheticEnv env(10, 3, RewardKind::kBinary, 0.0, 21);
  Rng rng(22);
  const auto log = generate_log(env, 100000, rng);
  std::vector<int> counts(10, 0);
  for (const auto& rec : log) ++counts[static_cast<size_t>(rec.logged_action)];
  for (int a = 0; a < 10; ++a) {
    EXPECT_NEAR(counts[static_cast<size_t>(a)] / 100000.0, 0.1, 0.01);
  }
}

TEST(GenerateLog, ReproducibleBySeed) {
  SyntheticEnv env_a(4, 3, RewardKind::kContinuous, 0.05, 31);
  SyntheticEnv env_b(4, 3, RewardKind::kContinuous, 0.05, 31);
  Rng rng_a(32);
  Rng rng_b(32);
  const auto log_a = generate_log(env_a, 200, rng_a);
  const auto log_b = generate_log(env_b, 200, rng_b);
  ASSERT_EQ(log_a.size(), log_b.size());
  for (size_t i = 0; i < log_a.size(); ++i) {
    EXPECT_EQ(log_a[i].logged_action, log_b[i].logged_action);
    EXPECT_EQ(log_a[i].logged_reward, log_b[i].logged_reward);
    EXPECT_EQ(log_a[i].contexts, log_b[i].contexts);
  }
}

TEST(GenerateLog, SingleArmAlwaysLogsActionZero) {
  SyntheticEnv env(1, 2, RewardKind::kBinary, 0.0, 41);
  Rng rng(42);
  for (const auto& rec : generate_log(env, 500, rng)) EXPECT_EQ(rec.logged_action, 0);
}

TEST(Replay, PerfectMatcherCreditsEveryRound) {
  SyntheticEnv env(5, 3, RewardKind::kBinary, 0.0, 51);
  Rng rng(52);
  const auto log = generate_log(env, 1000, rng);
  std::vector<int> script;
  double mean = 0.0;
  for (const auto& rec : log) {
    script.push_back(rec.logged_action);
    mean += rec.logged_reward;
  }
  mean /= static_cast<double>(log.size());
  ScriptedAgent agent(script);
  Rng replay_rng(53);
  const auto result = replay_evaluate(agent, log, replay_rng);
  EXPECT_EQ(result.matched, static_cast<long>(log.size()));
  EXPECT_NEAR(result.avg_reward, mean, 1e-12);
}

TEST(Replay, UniformPolicyMatchesAboutOneInN) {
  SyntheticEnv env(10, 3, RewardKind::kBinary, 0.0, 61);
  Rng rng(62);
  const auto log = generate_log(env, 10000, rng);
  hdcb::UniformRandomAgent agent;
  Rng replay_rng(63);
  const auto result = replay_evaluate(agent, log, replay_rng);
  EXPECT_NEAR(static_cast<double>(result.matched), 1000.0, 100.0);
}

TEST(Replay, EmptyLogThrows) {
  hdcb::UniformRandomAgent agent;
  Rng rng(64);
  const std::vector<LoggedRecord> empty;
  EXPECT_THROW(replay_evaluate(agent, empty, rng), hdcb::ContractViolation);
}

// Replay is unbiased for a deterministic target policy under uniform logging:
// the pooled replay average over many logs matches the analytic expected
// reward of the target arm. With d=1 the continuous mean reward is 0 or 1
// depending on the weight's sign, so E[clamped reward] has a closed form.
TEST(Replay, UnbiasedOnAnalyticInstance) {
  const double kNoise = 0.05;
  SyntheticEnv probe(2, 1, RewardKind::kContinuous, kNoise, 71);
  const double w0 = probe.weights()[0][0];
  const double mu0 = w0 > 0 ? 1.0 : 0.0;
  const double half_normal_mean = kNoise / std::sqrt(2.0 * M_PI);
  const double analytic = mu0 > 0.5 ? 1.0 - half_normal_mean : half_normal_mean;

  double total = 0.0;
  double total_sq = 0.0;
  long credited = 0;
  for (int s = 0; s < 200; ++s) {
    SyntheticEnv env(2, 1, RewardKind::kContinuous, kNoise, 71);  // same weights
    Rng rng(5000 + s);
    const auto log = generate_log(env, 400, rng);
    for (const auto& rec : log) {
      if (rec.logged_action != 0) continue;  // replay of the always-arm-0 policy
      total += rec.logged_reward;
      total_sq += rec.logged_reward * rec.logged_reward;
      ++credited;
    }
  }
  const double mean = total / static_cast<double>(credited);
  const double var = total_sq / static_cast<double>(credited) - mean * mean;
  const double se = std::sqrt(var / static_cast<double>(credited));
  EXPECT_NEAR(mean, analytic, 3.0 * se + 1e-6);
}

TEST(LogCsv, RoundTrips) {
  SyntheticEnv env(3, 2, RewardKind::kContinuous, 0.05, 81);
  Rng rng(82);
  const auto log = generate_log(env, 50, rng);
  const auto path = (fs::temp_directory_path() / "hdcb_log_roundtrip.csv").string();
  hdcb::write_log_csv(path, log);
  const auto back = hdcb::read_log_csv(path);
  ASSERT_EQ(back.size(), log.size());
  for (size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(back[i].logged_action, log[i].logged_action);
    EXPECT_DOUBLE_EQ(back[i].logged_reward, log[i].logged_reward);
    EXPECT_EQ(back[i].contexts, log[i].contexts);
    EXPECT_EQ(back[i].expected_rewards, log[i].expected_rewards);
  }
  fs::remove(path);
}

// ---- MovieLens fixtures ----

class MovielensFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "hdcb_ml_fixture";
    fs::create_directories(dir_);
    std::ofstream user(dir_ / "u.user");
    user << "196|49|M|writer|55105\n"
            "186|39|F|executive|00000\n"
            "22|25|M|writer|40206\n";
    user.close();
    std::ofstream data(dir_ / "u.data");
    data << "196\t242\t3\t881250949\n"
            "186\t302\t3\t891717742\n"
            "22\t377\t1\t878887116\n"
            "196\t302\t4\t881250950\n"
            "186\t242\t5\t891717743\n"
            "22\t242\t4\t878887117\n"
            "186\t377\t2\t891717744\n";
    data.close();
  }

  void TearDown() override { fs::remove_all(dir_); }

  std::string data_path() const { return (dir_ / "u.data").string(); }
  std::string user_path() const { return (dir_ / "u.user").string(); }

  fs::path dir_;
};

TEST_F(MovielensFixture, KeepsTopMoviesAndOrdersByTime) {
  const auto ds = hdcb::load_movielens(data_path(), user_path(), 2, 5);
  EXPECT_EQ(ds.total_ratings_parsed, 7);
  EXPECT_EQ(ds.n_actions, 2);
  // movie 242 has 3 ratings; 302 and 377 tie at 2 and the lower id wins
  ASSERT_TRUE(ds.arm_of_movie.count(242));
  ASSERT_TRUE(ds.arm_of_movie.count(302));
  EXPECT_FALSE(ds.arm_of_movie.count(377));
  ASSERT_EQ(ds.events.size(), 5u);
  for (size_t i = 1; i < ds.events.size(); ++i) {
    EXPECT_LE(ds.events[i - 1].timestamp, ds.events[i].timestamp);
  }
}

TEST_F(MovielensFixture, RewardIsPositiveRatingThreshold) {
  const auto ds = hdcb::load_movielens(data_path(), user_path(), 4, 5);
  // the row "196 242 3 ..." must produce reward 0; rating 4 produces 1
  for (const auto& ev : ds.events) {
    if (ev.movie_id == 242 && ev.timestamp == 881250949) {
      EXPECT_EQ(ev.reward, 0);
    }
    if (ev.movie_id == 302 && ev.timestamp == 881250950) {
      EXPECT_EQ(ev.reward, 1);
    }
  }
}

TEST_F(MovielensFixture, BuildsBoundedUserFeatures) {
  const auto ds = hdcb::load_movielens(data_path(), user_path(), 2, 5);
  for (const auto& ev : ds.events) {
    ASSERT_EQ(ev.user_features.size(), 5u);
    for (double f : ev.user_features) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
  // user 186: age 39, gender F, occupation "executive" (sorted index 0)
  const auto& ev = ds.events.back();  // timestamp 891717743 is user 186 on movie 242
  EXPECT_DOUBLE_EQ(ev.user_features[0], 0.39);
  EXPECT_DOUBLE_EQ(ev.user_features[1], 1.0);
  EXPECT_DOUBLE_EQ(ev.user_features[2], 1.0);
  EXPECT_DOUBLE_EQ(ev.user_features[3], 0.0);
}

TEST_F(MovielensFixture, DeterministicLoads) {
  const auto a = hdcb::load_movielens(data_path(), user_path(), 2, 5);
  const auto b = hdcb::load_movielens(data_path(), user_path(), 2, 5);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].movie_id, b.events[i].movie_id);
    EXPECT_EQ(a.events[i].user_features, b.events[i].user_features);
  }
}

TEST_F(MovielensFixture, MalformedRowNamesLineNumber) {
  std::ofstream data(dir_ / "u.data", std::ios::app);
  data << "broken row without tabs\n";
  data.close();
  try {
    (void)hdcb::load_movielens(data_path(), user_path(), 2, 5);
    FAIL() << "expected IoError";
  } catch (const hdcb::IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 8"), std::string::npos) << e.what();
  }
}

TEST_F(MovielensFixture, MissingFileThrows) {
  EXPECT_THROW(hdcb::load_movielens((dir_ / "nope.data").string(), user_path(), 2, 5),
               hdcb::IoError);
}

TEST_F(MovielensFixture, ReplayCreditsMatchingArmOnly) {
  const auto ds = hdcb::load_movielens(data_path(), user_path(), 2, 5);
  const int arm_242 = ds.arm_of_movie.at(242);
  FixedArmAgent agent(arm_242);
  Rng rng(91);
  const auto result = hdcb::replay_movielens(agent, ds, rng);
  EXPECT_EQ(result.matched, 3);                       // three ratings of movie 242
  EXPECT_NEAR(result.avg_reward, 2.0 / 3.0, 1e-12);   // ratings 4, 3, 5
}

}  // namespace
