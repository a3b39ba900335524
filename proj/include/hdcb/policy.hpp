#pragma once

// Shared policy-facing types: the per-step decision record, lightweight views
// over per-arm contexts (raw and encoded), and the agent interface the
// harness and replay evaluators drive.

#include <span>
#include <string>
#include <vector>

#include "hdcb/contract.hpp"
#include "hdcb/hypervector.hpp"
#include "hdcb/rng.hpp"

namespace hdcb {

struct PolicyDecision {
  int action = 0;
  std::vector<double> scores;  // per-arm payoff estimates or potentials
  bool explored = false;       // true when the epsilon branch fired
};

// Argmax with lowest-index tie-break.
inline int argmax_lowest(std::span<const double> scores) {
  require(!scores.empty(), "argmax: empty score vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

// N rows of raw features. Either one row per arm, or a single row shared by
// every arm (the disjoint-arm recommendation layout).
class ContextView {
 public:
  explicit ContextView(const std::vector<std::vector<double>>& per_arm)
      : rows_(&per_arm), n_(static_cast<int>(per_arm.size())) {}

  static ContextView shared_row(const std::vector<double>& row, int n_actions) {
    require(n_actions >= 1, "ContextView: need at least one action");
    ContextView view;
    view.shared_ = &row;
    view.n_ = n_actions;
    return view;
  }

  int n_actions() const { return n_; }
  bool shared() const { return shared_ != nullptr; }

  const std::vector<double>& arm(int a) const {
    return shared_ ? *shared_ : (*rows_)[static_cast<std::size_t>(a)];
  }

 private:
  ContextView() = default;

  const std::vector<std::vector<double>>* rows_ = nullptr;
  const std::vector<double>* shared_ = nullptr;
  int n_ = 0;
};

// Same idea over already-encoded hypervectors.
class EncodedContextView {
 public:
  explicit EncodedContextView(std::span<const Hypervector> per_arm)
      : arms_(per_arm), n_(static_cast<int>(per_arm.size())) {}

  EncodedContextView(const Hypervector& shared, int n_actions)
      : arms_(&shared, 1), n_(n_actions), shared_(true) {
    require(n_actions >= 1, "EncodedContextView: need at least one action");
  }

  int n_actions() const { return n_; }
  bool shared() const { return shared_; }

  const Hypervector& arm(int a) const {
    return shared_ ? arms_[0] : arms_[static_cast<std::size_t>(a)];
  }

 private:
  std::span<const Hypervector> arms_;
  int n_ = 0;
  bool shared_ = false;
};

// One observed round: per-arm contexts plus, for reference policies only, the
// environment's expected rewards. Learning policies must not read
// expected_rewards; it exists so oracle baselines can be driven by the same
// loop.
struct StepView {
  ContextView contexts;
  std::span<const double> expected_rewards{};
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual PolicyDecision select(const StepView& step, Rng& rng) = 0;

  // Called only for the chosen action, with the context observed for it in
  // the same round. The random source feeds stochastic update rules.
  virtual void update(int action, const std::vector<double>& context, double reward,
                      Rng& rng) = 0;

  virtual std::string name() const = 0;
};

}  // namespace hdcb
