#pragma once

// Real-valued hypervectors and the primitive operations on them: bundling
// (elementwise add), binding (elementwise multiply), cyclic permutation and
// cosine similarity, plus the random index mask used by thinning updates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "hdcb/contract.hpp"
#include "hdcb/rng.hpp"

namespace hdcb {

class Hypervector {
 public:
  Hypervector() = default;

  explicit Hypervector(int dim) : elems_(check_dim(dim), 0.0) {}

  explicit Hypervector(std::vector<double> elems) : elems_(std::move(elems)) {
    check_dim(static_cast<int>(elems_.size()));
  }

  int dim() const { return static_cast<int>(elems_.size()); }

  double operator[](int i) const { return elems_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return elems_[static_cast<std::size_t>(i)]; }

  const double* data() const { return elems_.data(); }
  double* data() { return elems_.data(); }

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  std::span<const double> span() const { return elems_; }

  void assign_zeros(int dim) { elems_.assign(static_cast<std::size_t>(check_dim(dim)), 0.0); }

  bool operator==(const Hypervector&) const = default;

  static Hypervector zeros(int dim) { return Hypervector(dim); }

  static Hypervector ones(int dim) {
    Hypervector v(dim);
    std::fill(v.elems_.begin(), v.elems_.end(), 1.0);
    return v;
  }

 private:
  static int check_dim(int dim) {
    require(dim >= 2, "Hypervector: dim must be >= 2");
    return dim;
  }

  std::vector<double> elems_;
};

// Uniform random bipolar vector; signs are taken from the bits of u64 draws.
inline Hypervector random_bipolar(int dim, Rng& rng) {
  Hypervector v(dim);
  std::uint64_t bits = 0;
  int left = 0;
  for (int i = 0; i < dim; ++i) {
    if (left == 0) {
      bits = rng.next_u64();
      left = 64;
    }
    v[i] = (bits & 1ULL) ? 1.0 : -1.0;
    bits >>= 1;
    --left;
  }
  return v;
}

inline void bundle_into(const Hypervector& a, const Hypervector& b, Hypervector& out) {
  require(a.dim() == b.dim(), "bundle: dimension mismatch");
  out.assign_zeros(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
}

inline Hypervector bundle(const Hypervector& a, const Hypervector& b) {
  Hypervector out;
  bundle_into(a, b, out);
  return out;
}

// acc += v
inline void bundle_accumulate(Hypervector& acc, const Hypervector& v) {
  require(acc.dim() == v.dim(), "bundle: dimension mismatch");
  for (int i = 0; i < acc.dim(); ++i) acc[i] += v[i];
}

inline void bind_into(const Hypervector& a, const Hypervector& b, Hypervector& out) {
  require(a.dim() == b.dim(), "bind: dimension mismatch");
  out.assign_zeros(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = a[i] * b[i];
}

inline Hypervector bind(const Hypervector& a, const Hypervector& b) {
  Hypervector out;
  bind_into(a, b, out);
  return out;
}

// Right rotation by k positions: element i moves to (i + k) mod dim.
inline void permute_into(const Hypervector& a, long long k, Hypervector& out) {
  require(k >= 0, "permute: shift must be >= 0");
  const int d = a.dim();
  const int shift = static_cast<int>(k % d);
  out.assign_zeros(d);
  for (int i = 0; i < d; ++i) {
    int j = i + shift;
    if (j >= d) j -= d;
    out[j] = a[i];
  }
}

inline Hypervector permute(const Hypervector& a, long long k) {
  Hypervector out;
  permute_into(a, k, out);
  return out;
}

inline double dot(const Hypervector& a, const Hypervector& b) {
  require(a.dim() == b.dim(), "dot: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(const Hypervector& a) {
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i) acc += a[i] * a[i];
  return acc;
}

namespace detail {

// Shared cosine kernel so cached-norm call sites agree bit-for-bit with
// similarity(). Zero-norm inputs read as similarity 0: an empty memory
// carries no evidence.
inline double cosine_from_parts(double dot_ab, double norm2_a, double norm2_b) {
  if (norm2_a <= 0.0 || norm2_b <= 0.0) return 0.0;
  return dot_ab / std::sqrt(norm2_a * norm2_b);
}

}  // namespace detail

inline double similarity(const Hypervector& a, const Hypervector& b) {
  require(a.dim() == b.dim(), "similarity: dimension mismatch");
  return detail::cosine_from_parts(dot(a, b), norm2(a), norm2(b));
}

inline bool all_finite(const Hypervector& a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

struct ThinningMask {
  std::vector<int> positions;  // distinct, each in [0, dim)
  int dim = 0;
};

// Exactly floor(clamp(c, 0, 1) * dim) distinct positions, uniform without
// replacement (partial Fisher-Yates).
inline ThinningMask draw_thinning_mask(double c, int dim, Rng& rng) {
  require(dim >= 1, "draw_thinning_mask: dim must be >= 1");
  const double cc = std::clamp(c, 0.0, 1.0);
  const int count = static_cast<int>(std::floor(cc * static_cast<double>(dim)));

  ThinningMask mask;
  mask.dim = dim;
  if (count == 0) return mask;

  std::vector<int> idx(static_cast<std::size_t>(dim));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + rng.uniform_int(dim - i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(count));
  mask.positions = std::move(idx);
  return mask;
}

}  // namespace hdcb
