#include <cmath>
#include <cstring>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "hdcb/encoding.hpp"

namespace {

using hdcb::build_codebook;
using hdcb::encode_context;
using hdcb::encode_reward;
using hdcb::EncoderCodebook;
using hdcb::Hypervector;
using hdcb::quantize;
using hdcb::RewardEncoder;
using hdcb::similarity;

bool is_bipolar(const Hypervector& v) {
  for (double x : v)
    if (x != 1.0 && x != -1.0) return false;
  return true;
}

// FNV-1a over the codebook's raw bytes; used for the immutability check.
std::uint64_t checksum(const EncoderCodebook& cb) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const Hypervector& v) {
    for (double x : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xff;
        h *= 1099511628211ULL;
      }
    }
  };
  for (const auto& v : cb.base_vectors) mix(v);
  for (const auto& v : cb.level_vectors) mix(v);
  return h;
}

TEST(Codebook, DeterministicForSeed) {
  const auto a = build_codebook(8, 512, 10, {0, 1}, 777);
  const auto b = build_codebook(8, 512, 10, {0, 1}, 777);
  EXPECT_EQ(a.base_vectors, b.base_vectors);
  EXPECT_EQ(a.level_vectors, b.level_vectors);
  const auto c = build_codebook(8, 512, 10, {0, 1}, 778);
  EXPECT_NE(a.base_vectors, c.base_vectors);
}

TEST(Codebook, ShapesAndBipolarAtoms) {
  const auto cb = build_codebook(5, 256, 12, {-2, 2}, 1);
  ASSERT_EQ(cb.base_vectors.size(), 5u);
  ASSERT_EQ(cb.level_vectors.size(), 12u);
  for (const auto& v : cb.base_vectors) {
    EXPECT_EQ(v.dim(), 256);
    EXPECT_TRUE(is_bipolar(v));
  }
  for (const auto& v : cb.level_vectors) EXPECT_TRUE(is_bipolar(v));
}

// Flipping exactly half the positions of a bipolar vector zeroes the expected
// cosine between the endpoint levels.
TEST(Codebook, EndpointLevelsNearOrthogonal) {
  const int kDim = 10000;
  const auto cb = build_codebook(1, kDim, 10, {0, 1}, 99);
  const double s = similarity(cb.level_vectors.front(), cb.level_vectors.back());
  EXPECT_LT(std::abs(s), 2.0 / std::sqrt(static_cast<double>(kDim)));
}

TEST(Codebook, AdjacentLevelsMoreSimilarThanEndpoints) {
  const auto cb = build_codebook(1, 10000, 10, {0, 1}, 100);
  const double near = similarity(cb.level_vectors[0], cb.level_vectors[1]);
  const double far = similarity(cb.level_vectors[0], cb.level_vectors[9]);
  EXPECT_GT(near, far);
}

// Invariant: level similarity is non-increasing in the level distance.
TEST(Codebook, LevelSimilarityMonotoneInDistance) {
  const auto cb = build_codebook(1, 2048, 8, {0, 1}, 101);
  for (int j = 0; j < 8; ++j) {
    double prev = 2.0;
    for (int k = j; k < 8; ++k) {
      const double s = similarity(cb.level_vectors[static_cast<size_t>(j)],
                                  cb.level_vectors[static_cast<size_t>(k)]);
      EXPECT_LE(s, prev + 1e-12) << "levels " << j << "," << k;
      prev = s;
    }
  }
}

TEST(Codebook, RejectsBadShapes) {
  EXPECT_THROW(build_codebook(0, 128, 10, {0, 1}, 1), hdcb::ContractViolation);
  EXPECT_THROW(build_codebook(3, 1, 10, {0, 1}, 1), hdcb::ContractViolation);
  EXPECT_THROW(build_codebook(3, 128, 1, {0, 1}, 1), hdcb::ContractViolation);
  EXPECT_THROW(build_codebook(3, 128, 10, {1, 1}, 1), hdcb::ContractViolation);
}

TEST(Quantize, BoundsAndBins) {
  const auto cb = build_codebook(1, 64, 10, {0, 1}, 5);
  EXPECT_EQ(quantize(0.0, cb), 0);
  EXPECT_EQ(quantize(1.0, cb), 9);
  EXPECT_EQ(quantize(0.55, cb), 5);
  EXPECT_EQ(quantize(-3.0, cb), 0);
  EXPECT_EQ(quantize(42.0, cb), 9);
}

TEST(EncodeContext, Deterministic) {
  const auto cb = build_codebook(4, 512, 10, {0, 1}, 6);
  const std::vector<double> x{0.1, 0.4, 0.9, 0.2};
  EXPECT_EQ(encode_context(x, cb), encode_context(x, cb));
}

TEST(EncodeContext, EqualAfterQuantizationMeansIdentical) {
  const auto cb = build_codebook(3, 512, 10, {0, 1}, 7);
  const std::vector<double> x{0.11, 0.52, 0.93};
  const std::vector<double> y{0.13, 0.57, 0.91};  // same bins
  const auto hx = encode_context(x, cb);
  const auto hy = encode_context(y, cb);
  EXPECT_EQ(hx, hy);
  EXPECT_DOUBLE_EQ(similarity(hx, hy), 1.0);
}

TEST(EncodeContext, LengthMismatchThrows) {
  const auto cb = build_codebook(3, 128, 10, {0, 1}, 8);
  const std::vector<double> x{0.1, 0.2};
  EXPECT_THROW(encode_context(x, cb), hdcb::ContractViolation);
}

// Two contexts that differ in one of d features by the full range keep about
// (d-1)/d of their bundled terms in common.
TEST(EncodeContext, SingleFeatureFlipKeepsHighSimilarity) {
  const int kD = 10;
  double mean = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto cb = build_codebook(kD, 10000, 10, {0, 1}, 1000 + trial);
    std::vector<double> x(kD, 0.35);
    std::vector<double> y = x;
    y[static_cast<size_t>(trial % kD)] = 1.0;
    mean += similarity(encode_context(x, cb), encode_context(y, cb));
  }
  mean /= 100.0;
  EXPECT_NEAR(mean, 0.9, 0.05);
}

// Invariant: similarity is non-increasing as more features change bins.
// Exhaustive over a small grid.
TEST(EncodeContext, LocalityOverSmallGrid) {
  const int kD = 3;
  const int kQ = 4;
  const auto cb = build_codebook(kD, 2048, kQ, {0, 1}, 2024);

  std::vector<std::vector<double>> grid;
  for (int a = 0; a < kQ; ++a)
    for (int b = 0; b < kQ; ++b)
      for (int c = 0; c < kQ; ++c)
        grid.push_back({(a + 0.5) / kQ, (b + 0.5) / kQ, (c + 0.5) / kQ});

  std::map<int, std::pair<double, int>> by_differing;  // count -> (sum, n)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto hi = encode_context(grid[i], cb);
    for (std::size_t j = i; j < grid.size(); ++j) {
      int differing = 0;
      for (int f = 0; f < kD; ++f)
        if (quantize(grid[i][static_cast<size_t>(f)], cb) !=
            quantize(grid[j][static_cast<size_t>(f)], cb))
          ++differing;
      auto& slot = by_differing[differing];
      slot.first += similarity(hi, encode_context(grid[j], cb));
      slot.second += 1;
    }
  }
  double prev = 2.0;
  for (const auto& [differing, stat] : by_differing) {
    const double mean = stat.first / stat.second;
    EXPECT_LT(mean, prev) << "differing=" << differing;
    prev = mean;
  }
}

TEST(EncodeReward, Endpoints) {
  const RewardEncoder enc(100, {0, 1});
  EXPECT_EQ(encode_reward(1.0, enc), Hypervector::ones(100));
  Hypervector all_minus(100);
  for (int i = 0; i < 100; ++i) all_minus[i] = -1.0;
  EXPECT_EQ(encode_reward(0.0, enc), all_minus);
  // out-of-range rewards clamp to the endpoints
  EXPECT_EQ(encode_reward(7.0, enc), Hypervector::ones(100));
  EXPECT_EQ(encode_reward(-7.0, enc), all_minus);
}

TEST(EncodeReward, HalfActivation) {
  const RewardEncoder enc(1000, {0, 1});
  const auto v = encode_reward(0.5, enc);
  for (int i = 0; i < 500; ++i) ASSERT_EQ(v[i], 1.0);
  for (int i = 500; i < 1000; ++i) ASSERT_EQ(v[i], -1.0);
}

// Invariant: closer rewards encode to more similar hypervectors.
TEST(EncodeReward, MonotoneSimilarity) {
  const RewardEncoder enc(1000, {0, 1});
  hdcb::Rng rng(2025);
  for (int t = 0; t < 500; ++t) {
    double r1 = rng.uniform01();
    double r2 = rng.uniform01();
    double r3 = rng.uniform01();
    if (r1 > r2) std::swap(r1, r2);
    if (r2 > r3) std::swap(r2, r3);
    if (r1 > r2) std::swap(r1, r2);
    const auto h1 = encode_reward(r1, enc);
    const double near = similarity(h1, encode_reward(r2, enc));
    const double far = similarity(h1, encode_reward(r3, enc));
    EXPECT_GE(near, far - 1e-12);
  }
}

TEST(Codebook, EncodingDoesNotMutateCodebook) {
  const auto cb = build_codebook(6, 512, 10, {0, 1}, 31);
  const auto before = checksum(cb);
  hdcb::Rng rng(32);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform01();
    (void)encode_context(x, cb);
  }
  EXPECT_EQ(checksum(cb), before);
}

}  // namespace
