#pragma once

// Agent adapters: wrap each policy behind the uniform select/update interface
// the run loops drive. HD agents own the encoder pair and encode contexts on
// every step (encoding is part of their per-decision cost); linear agents
// pass raw features straight through. Oracle and uniform-random agents are
// reference baselines.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hdcb/encoding.hpp"
#include "hdcb/hd_policies.hpp"
#include "hdcb/linear_policies.hpp"
#include "hdcb/policy.hpp"

namespace hdcb {

template <class Policy>
class HdAgent final : public Agent {
 public:
  HdAgent(std::string name, Policy policy, EncoderCodebook codebook, RewardEncoder reward_encoder)
      : name_(std::move(name)),
        policy_(std::move(policy)),
        codebook_(std::move(codebook)),
        reward_encoder_(reward_encoder) {
    require(codebook_.dim == policy_.dim(), "HdAgent: codebook and policy dims differ");
    require(reward_encoder_.dim == policy_.dim(), "HdAgent: reward encoder dim differs");
  }

  PolicyDecision select(const StepView& step, Rng& rng) override {
    const int n = step.contexts.n_actions();
    require(n == policy_.n_actions(), "select: arm count mismatch");
    if (step.contexts.shared()) {
      ensure_buffers(1);
      encode_context_into(step.contexts.arm(0), codebook_, encoded_[0]);
      return dispatch_select(EncodedContextView(encoded_[0], n), rng);
    }
    ensure_buffers(n);
    for (int a = 0; a < n; ++a) {
      encode_context_into(step.contexts.arm(a), codebook_, encoded_[static_cast<std::size_t>(a)]);
    }
    return dispatch_select(
        EncodedContextView(std::span<const Hypervector>(encoded_.data(), static_cast<std::size_t>(n))),
        rng);
  }

  void update(int action, const std::vector<double>& context, double reward, Rng& rng) override {
    encode_context_into(context, codebook_, update_hv_);
    if constexpr (requires(Policy& p) {
                    p.update(action, update_hv_, reward, reward_encoder_);
                  }) {
      (void)rng;
      policy_.update(action, update_hv_, reward, reward_encoder_);
    } else {
      policy_.update(action, update_hv_, reward, last_confidence_, reward_encoder_, rng);
    }
  }

  std::string name() const override { return name_; }

  const Policy& policy() const { return policy_; }
  const EncoderCodebook& codebook() const { return codebook_; }

 private:
  PolicyDecision dispatch_select(const EncodedContextView& view, Rng& rng) {
    if constexpr (requires(Policy& p) { p.select(view, rng); }) {
      return policy_.select(view, rng);
    } else {
      auto out = policy_.select(view);
      if constexpr (std::is_same_v<std::remove_cvref_t<decltype(out)>, PolicyDecision>) {
        return out;
      } else {
        last_confidence_ = out.confidence;
        return out.decision;
      }
    }
  }

  void ensure_buffers(int n) {
    while (static_cast<int>(encoded_.size()) < n) encoded_.emplace_back(codebook_.dim);
  }

  std::string name_;
  Policy policy_;
  EncoderCodebook codebook_;
  RewardEncoder reward_encoder_;
  std::vector<Hypervector> encoded_;
  Hypervector update_hv_;
  double last_confidence_ = 0.0;  // set by select for the confidence-driven variants
};

class LinEpsAgent final : public Agent {
 public:
  LinEpsAgent(int n_actions, int d, double epsilon, LinearMode mode)
      : policy_(n_actions, d, epsilon, mode) {}

  PolicyDecision select(const StepView& step, Rng& rng) override {
    return policy_.select(step.contexts, rng);
  }
  void update(int action, const std::vector<double>& context, double reward, Rng&) override {
    policy_.update(action, context, reward);
  }
  std::string name() const override { return "lineps"; }
  const LinEpsPolicy& policy() const { return policy_; }

 private:
  LinEpsPolicy policy_;
};

class LinUcbAgent final : public Agent {
 public:
  LinUcbAgent(int n_actions, int d, double alpha, LinearMode mode)
      : policy_(n_actions, d, alpha, mode) {}

  PolicyDecision select(const StepView& step, Rng&) override {
    return policy_.select(step.contexts);
  }
  void update(int action, const std::vector<double>& context, double reward, Rng&) override {
    policy_.update(action, context, reward);
  }
  std::string name() const override { return "linucb"; }
  const LinUcbPolicy& policy() const { return policy_; }

 private:
  LinUcbPolicy policy_;
};

// Reads the environment's expected rewards; the regret reference point.
class OracleAgent final : public Agent {
 public:
  PolicyDecision select(const StepView& step, Rng&) override {
    require(!step.expected_rewards.empty(), "oracle: expected rewards unavailable");
    PolicyDecision decision;
    decision.scores.assign(step.expected_rewards.begin(), step.expected_rewards.end());
    decision.action = argmax_lowest(decision.scores);
    return decision;
  }
  void update(int, const std::vector<double>&, double, Rng&) override {}
  std::string name() const override { return "oracle"; }
};

class UniformRandomAgent final : public Agent {
 public:
  PolicyDecision select(const StepView& step, Rng& rng) override {
    PolicyDecision decision;
    decision.scores.assign(static_cast<std::size_t>(step.contexts.n_actions()), 0.0);
    decision.action = rng.uniform_int(step.contexts.n_actions());
    decision.explored = true;
    return decision;
  }
  void update(int, const std::vector<double>&, double, Rng&) override {}
  std::string name() const override { return "uniform_random"; }
};

}  // namespace hdcb
