#pragma once

// Context and reward encoders. Contexts use record-based encoding: each
// feature index owns a random bipolar base vector, feature values are
// quantized onto correlated level vectors, and the bound id-value pairs are
// bundled into one hypervector. Scalar rewards use thermometer encoding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "hdcb/contract.hpp"
#include "hdcb/hypervector.hpp"
#include "hdcb/rng.hpp"

namespace hdcb {

struct EncoderCodebook {
  std::vector<Hypervector> base_vectors;   // one bipolar vector per feature index
  std::vector<Hypervector> level_vectors;  // q_levels correlated vectors
  int q_levels = 0;
  std::pair<double, double> feature_range{0.0, 1.0};
  int dim = 0;
  std::uint64_t seed = 0;

  int n_features() const { return static_cast<int>(base_vectors.size()); }
};

namespace detail {
inline constexpr std::uint64_t kCodebookBaseStream = 0x62617365;   // base vectors
inline constexpr std::uint64_t kCodebookLevelStream = 0x6c65766c;  // level chain
}  // namespace detail

// Level vectors are built by cumulative flipping: pick LV_0 at random and a
// random half of its positions; level j flips the first floor(j*(D/2)/(Q-1))
// of those positions, so adjacent levels stay similar while the endpoints are
// nearly orthogonal.
inline EncoderCodebook build_codebook(int d, int dim, int q_levels,
                                      std::pair<double, double> feature_range,
                                      std::uint64_t seed) {
  require(d >= 1, "build_codebook: need at least one feature");
  require(dim >= 2, "build_codebook: dim must be >= 2");
  require(q_levels >= 2, "build_codebook: need at least two levels");
  require(feature_range.first < feature_range.second,
          "build_codebook: feature_range must have lo < hi");

  EncoderCodebook cb;
  cb.q_levels = q_levels;
  cb.feature_range = feature_range;
  cb.dim = dim;
  cb.seed = seed;

  Rng base_rng(mix_seed(seed, detail::kCodebookBaseStream));
  cb.base_vectors.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) cb.base_vectors.push_back(random_bipolar(dim, base_rng));

  Rng level_rng(mix_seed(seed, detail::kCodebookLevelStream));
  const Hypervector first = random_bipolar(dim, level_rng);

  const int half = dim / 2;
  std::vector<int> flip_order(static_cast<std::size_t>(dim));
  std::iota(flip_order.begin(), flip_order.end(), 0);
  for (int i = 0; i < half; ++i) {
    const int j = i + level_rng.uniform_int(dim - i);
    std::swap(flip_order[static_cast<std::size_t>(i)], flip_order[static_cast<std::size_t>(j)]);
  }

  cb.level_vectors.reserve(static_cast<std::size_t>(q_levels));
  for (int level = 0; level < q_levels; ++level) {
    Hypervector v = first;
    const long long flips =
        static_cast<long long>(level) * half / (q_levels - 1);
    for (long long f = 0; f < flips; ++f) {
      const int pos = flip_order[static_cast<std::size_t>(f)];
      v[pos] = -v[pos];
    }
    cb.level_vectors.push_back(std::move(v));
  }
  return cb;
}

// Uniform-width binning over the declared feature range; values outside the
// range clamp to the nearest bin and v == hi lands in the top bin.
inline int quantize(double value, const EncoderCodebook& cb) {
  const auto [lo, hi] = cb.feature_range;
  const double v = std::clamp(value, lo, hi);
  const double scaled = (v - lo) / (hi - lo) * static_cast<double>(cb.q_levels);
  const int level = static_cast<int>(std::floor(scaled));
  return std::clamp(level, 0, cb.q_levels - 1);
}

inline void encode_context_into(std::span<const double> x, const EncoderCodebook& cb,
                                Hypervector& out) {
  require(static_cast<int>(x.size()) == cb.n_features(),
          "encode_context: feature count mismatch");
  out.assign_zeros(cb.dim);
  for (int f = 0; f < cb.n_features(); ++f) {
    const Hypervector& base = cb.base_vectors[static_cast<std::size_t>(f)];
    const Hypervector& level =
        cb.level_vectors[static_cast<std::size_t>(quantize(x[static_cast<std::size_t>(f)], cb))];
    for (int i = 0; i < cb.dim; ++i) out[i] += base[i] * level[i];
  }
}

inline Hypervector encode_context(std::span<const double> x, const EncoderCodebook& cb) {
  Hypervector out;
  encode_context_into(x, cb, out);
  return out;
}

struct RewardEncoder {
  int dim = 0;
  std::pair<double, double> reward_range{0.0, 1.0};

  RewardEncoder(int dim_, std::pair<double, double> range) : dim(dim_), reward_range(range) {
    require(dim >= 2, "RewardEncoder: dim must be >= 2");
    require(range.first < range.second, "RewardEncoder: reward_range must have lo < hi");
  }
};

// Thermometer code: the first floor(normalized(r) * D) elements are +1, the
// rest -1, so binding a context by a reward modulates its sign elementwise.
inline void encode_reward_into(double r, const RewardEncoder& enc, Hypervector& out) {
  const auto [lo, hi] = enc.reward_range;
  const double normalized = (std::clamp(r, lo, hi) - lo) / (hi - lo);
  const int active = static_cast<int>(std::floor(normalized * static_cast<double>(enc.dim)));
  out.assign_zeros(enc.dim);
  for (int i = 0; i < enc.dim; ++i) out[i] = i < active ? 1.0 : -1.0;
}

inline Hypervector encode_reward(double r, const RewardEncoder& enc) {
  Hypervector out;
  encode_reward_into(r, enc, out);
  return out;
}

}  // namespace hdcb
