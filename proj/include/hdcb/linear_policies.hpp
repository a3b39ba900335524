#pragma once

// Disjoint linear bandit baselines. Each arm keeps a ridge design matrix A
// (initialized to the identity) and a response vector b; the payoff estimate
// is theta . x with theta = A^-1 b, and the UCB potential adds
// alpha * sqrt(x^T A^-1 x).
//
// Two execution modes share the exact same model semantics:
//   naive             re-inverts A by Gauss-Jordan elimination on every score
//                     query, the O(d^3) profile of the classic algorithm
//   sherman_morrison  maintains A^-1 incrementally through the rank-one
//                     update formula, O(d^2) per step
//
// Matrices are tiny (d up to a few hundred), row-major, hand-rolled.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "hdcb/contract.hpp"
#include "hdcb/policy.hpp"
#include "hdcb/rng.hpp"

namespace hdcb {

enum class LinearMode { kNaive, kShermanMorrison };

namespace linalg {

// Number of full matrix inversions performed since process start; benchmarks
// and tests use it to assert that the incremental mode never re-inverts.
inline std::atomic<std::uint64_t>& inversion_count() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

// Gauss-Jordan with partial pivoting on an augmented [A | I] tableau.
inline void invert(std::span<const double> matrix, int d, std::vector<double>& out) {
  inversion_count().fetch_add(1, std::memory_order_relaxed);
  const int width = 2 * d;
  std::vector<double> aug(static_cast<std::size_t>(d) * width, 0.0);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) aug[static_cast<std::size_t>(r) * width + c] = matrix[static_cast<std::size_t>(r) * d + c];
    aug[static_cast<std::size_t>(r) * width + d + r] = 1.0;
  }
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    double best = std::abs(aug[static_cast<std::size_t>(col) * width + col]);
    for (int r = col + 1; r < d; ++r) {
      const double v = std::abs(aug[static_cast<std::size_t>(r) * width + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) throw NumericError("invert: singular matrix");
    if (pivot != col) {
      for (int c = 0; c < width; ++c) {
        std::swap(aug[static_cast<std::size_t>(col) * width + c],
                  aug[static_cast<std::size_t>(pivot) * width + c]);
      }
    }
    const double inv_pivot = 1.0 / aug[static_cast<std::size_t>(col) * width + col];
    for (int c = 0; c < width; ++c) aug[static_cast<std::size_t>(col) * width + c] *= inv_pivot;
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      const double factor = aug[static_cast<std::size_t>(r) * width + col];
      if (factor == 0.0) continue;
      for (int c = 0; c < width; ++c) {
        aug[static_cast<std::size_t>(r) * width + c] -=
            factor * aug[static_cast<std::size_t>(col) * width + c];
      }
    }
  }
  out.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      out[static_cast<std::size_t>(r) * d + c] = aug[static_cast<std::size_t>(r) * width + d + c];
    }
  }
}

inline void mat_vec(std::span<const double> matrix, int d, std::span<const double> x,
                    std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(d), 0.0);
  for (int r = 0; r < d; ++r) {
    double acc = 0.0;
    for (int c = 0; c < d; ++c) acc += matrix[static_cast<std::size_t>(r) * d + c] * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
}

inline double vec_dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace linalg

class LinearActionModel {
 public:
  LinearActionModel(int d, LinearMode mode)
      : d_(d),
        mode_(mode),
        a_(static_cast<std::size_t>(d) * d, 0.0),
        b_(static_cast<std::size_t>(d), 0.0),
        a_inv_(static_cast<std::size_t>(d) * d, 0.0),
        theta_(static_cast<std::size_t>(d), 0.0) {
    require(d >= 1, "LinearActionModel: need d >= 1");
    for (int i = 0; i < d; ++i) {
      a_[static_cast<std::size_t>(i) * d + i] = 1.0;
      a_inv_[static_cast<std::size_t>(i) * d + i] = 1.0;
    }
  }

  int dim() const { return d_; }
  LinearMode mode() const { return mode_; }
  std::span<const double> design_matrix() const { return a_; }
  std::span<const double> response() const { return b_; }
  std::span<const double> cached_inverse() const { return a_inv_; }

  // theta . x
  double payoff(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == d_, "payoff: dimension mismatch");
    if (mode_ == LinearMode::kNaive) {
      linalg::invert(a_, d_, inv_scratch_);
      linalg::mat_vec(inv_scratch_, d_, b_, theta_scratch_);
      return linalg::vec_dot(theta_scratch_, x);
    }
    return linalg::vec_dot(theta_, x);
  }

  // theta . x + alpha * sqrt(x^T A^-1 x)
  double ucb_potential(std::span<const double> x, double alpha) const {
    require(static_cast<int>(x.size()) == d_, "ucb_potential: dimension mismatch");
    require(alpha >= 0.0, "ucb_potential: alpha must be >= 0");
    const std::vector<double>* inv = &a_inv_;
    double mean;
    if (mode_ == LinearMode::kNaive) {
      linalg::invert(a_, d_, inv_scratch_);
      inv = &inv_scratch_;
      linalg::mat_vec(*inv, d_, b_, theta_scratch_);
      mean = linalg::vec_dot(theta_scratch_, x);
    } else {
      mean = linalg::vec_dot(theta_, x);
    }
    linalg::mat_vec(*inv, d_, x, vec_scratch_);
    double radicand = linalg::vec_dot(x, vec_scratch_);
    if (radicand < 0.0) {
      if (radicand < -1e-12) throw NumericError("ucb_potential: negative confidence radicand");
      radicand = 0.0;
    }
    return mean + alpha * std::sqrt(radicand);
  }

  // A += x x^T, b += r x; the incremental mode folds the rank-one update into
  // the cached inverse and refreshes theta.
  void update(std::span<const double> x, double r) {
    require(static_cast<int>(x.size()) == d_, "update: dimension mismatch");
    for (int i = 0; i < d_; ++i) {
      for (int j = 0; j < d_; ++j) {
        a_[static_cast<std::size_t>(i) * d_ + j] += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
      }
      b_[static_cast<std::size_t>(i)] += r * x[static_cast<std::size_t>(i)];
    }
    if (mode_ == LinearMode::kShermanMorrison) {
      // A_inv -= (A_inv x)(x^T A_inv) / (1 + x^T A_inv x)
      linalg::mat_vec(a_inv_, d_, x, vec_scratch_);  // A_inv x (A_inv symmetric)
      const double denom = 1.0 + linalg::vec_dot(x, vec_scratch_);
      if (denom <= 0.0) throw NumericError("update: non-positive rank-one denominator");
      for (int i = 0; i < d_; ++i) {
        const double vi = vec_scratch_[static_cast<std::size_t>(i)];
        for (int j = 0; j < d_; ++j) {
          a_inv_[static_cast<std::size_t>(i) * d_ + j] -=
              vi * vec_scratch_[static_cast<std::size_t>(j)] / denom;
        }
      }
      linalg::mat_vec(a_inv_, d_, b_, theta_);
    }
  }

 private:
  int d_;
  LinearMode mode_;
  std::vector<double> a_;      // ridge design matrix, SPD with eigenvalues >= 1
  std::vector<double> b_;
  std::vector<double> a_inv_;  // maintained in sherman_morrison mode
  std::vector<double> theta_;  // A^-1 b, maintained in sherman_morrison mode
  mutable std::vector<double> inv_scratch_;
  mutable std::vector<double> theta_scratch_;
  mutable std::vector<double> vec_scratch_;
};

class LinEpsPolicy {
 public:
  LinEpsPolicy(int n_actions, int d, double epsilon, LinearMode mode)
      : epsilon_(epsilon), models_(static_cast<std::size_t>(n_actions), LinearActionModel(d, mode)) {
    require(n_actions >= 1, "LinEpsPolicy: need at least one action");
    require(epsilon >= 0.0 && epsilon <= 1.0, "LinEpsPolicy: epsilon must lie in [0,1]");
  }

  PolicyDecision select(const ContextView& contexts, Rng& rng) const {
    require(contexts.n_actions() == n_actions(), "select: arm count mismatch");
    PolicyDecision decision;
    decision.scores.resize(static_cast<std::size_t>(n_actions()));
    for (int a = 0; a < n_actions(); ++a) {
      decision.scores[static_cast<std::size_t>(a)] =
          models_[static_cast<std::size_t>(a)].payoff(contexts.arm(a));
    }
    if (rng.uniform01() < epsilon_) {
      decision.action = rng.uniform_int(n_actions());
      decision.explored = true;
    } else {
      decision.action = argmax_lowest(decision.scores);
    }
    return decision;
  }

  void update(int action, std::span<const double> x, double r) {
    require(action >= 0 && action < n_actions(), "update: action out of range");
    models_[static_cast<std::size_t>(action)].update(x, r);
  }

  int n_actions() const { return static_cast<int>(models_.size()); }
  const LinearActionModel& model(int a) const { return models_[static_cast<std::size_t>(a)]; }

 private:
  double epsilon_;
  std::vector<LinearActionModel> models_;
};

class LinUcbPolicy {
 public:
  LinUcbPolicy(int n_actions, int d, double alpha, LinearMode mode)
      : alpha_(alpha), models_(static_cast<std::size_t>(n_actions), LinearActionModel(d, mode)) {
    require(n_actions >= 1, "LinUcbPolicy: need at least one action");
    require(alpha >= 0.0, "LinUcbPolicy: alpha must be >= 0");
  }

  PolicyDecision select(const ContextView& contexts) const {
    require(contexts.n_actions() == n_actions(), "select: arm count mismatch");
    PolicyDecision decision;
    decision.scores.resize(static_cast<std::size_t>(n_actions()));
    for (int a = 0; a < n_actions(); ++a) {
      decision.scores[static_cast<std::size_t>(a)] =
          models_[static_cast<std::size_t>(a)].ucb_potential(contexts.arm(a), alpha_);
    }
    decision.action = argmax_lowest(decision.scores);
    return decision;
  }

  void update(int action, std::span<const double> x, double r) {
    require(action >= 0 && action < n_actions(), "update: action out of range");
    models_[static_cast<std::size_t>(action)].update(x, r);
  }

  int n_actions() const { return static_cast<int>(models_.size()); }
  double alpha() const { return alpha_; }
  const LinearActionModel& model(int a) const { return models_[static_cast<std::size_t>(a)]; }

 private:
  double alpha_;
  std::vector<LinearActionModel> models_;
};

}  // namespace hdcb
