#pragma once

// The four hyperdimensional contextual-bandit policies. All of them score an
// arm as the cosine between a learned memory hypervector and the encoded
// context, and learn by bundling the context bound with a thermometer-encoded
// reward into the chosen arm's memory:
//
//   eps   epsilon-greedy over payoff estimates; one memory per arm.
//   unc1  adds a per-arm confidence memory updated by an exponential moving
//         average; explores by potential = payoff + alpha * uncertainty.
//   unc2  like unc1 but replaces the moving-average rate with a thinning
//         update: a random subset of confidence elements, sized by the
//         current confidence, is overwritten with the context.
//   unc3  collapses all arms into two global memories by giving each arm a
//         unique cyclic permutation of the context.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hdcb/contract.hpp"
#include "hdcb/encoding.hpp"
#include "hdcb/hypervector.hpp"
#include "hdcb/policy.hpp"
#include "hdcb/rng.hpp"

namespace hdcb {

// Payoff estimates for a bank of arm memories against per-arm contexts.
inline std::vector<double> estimate_payoffs(std::span<const Hypervector> memories,
                                            const EncodedContextView& contexts) {
  require(static_cast<int>(memories.size()) == contexts.n_actions(),
          "estimate_payoffs: arm count mismatch");
  std::vector<double> payoffs(memories.size());
  for (int a = 0; a < contexts.n_actions(); ++a) {
    payoffs[static_cast<std::size_t>(a)] = similarity(memories[static_cast<std::size_t>(a)],
                                                      contexts.arm(a));
  }
  return payoffs;
}

// Selection and update outcome for the confidence-driven variants: the raw
// (unclamped) confidence of the chosen arm feeds the follow-up update.
struct SelectOutcome {
  PolicyDecision decision;
  double confidence = 0.0;
};

namespace detail {

inline double clamp01(double c) { return std::clamp(c, 0.0, 1.0); }

// Memory bank with cached squared norms. Norms are recomputed from scratch
// after every write so cached-path scores match a fresh similarity() call
// bit-for-bit.
class MemoryBank {
 public:
  MemoryBank(int n_actions, int dim)
      : memories_(static_cast<std::size_t>(n_actions), Hypervector(dim)),
        norm2_(static_cast<std::size_t>(n_actions), 0.0) {}

  int size() const { return static_cast<int>(memories_.size()); }
  int dim() const { return memories_.front().dim(); }

  const Hypervector& at(int a) const { return memories_[static_cast<std::size_t>(a)]; }
  std::span<const Hypervector> all() const { return memories_; }
  double norm2_of(int a) const { return norm2_[static_cast<std::size_t>(a)]; }

  void set(int a, Hypervector v) {
    require(v.dim() == dim(), "MemoryBank: dimension mismatch");
    memories_[static_cast<std::size_t>(a)] = std::move(v);
    refresh_norm(a);
  }

  // memory_a += context (x) reward_hv, elementwise product
  void accumulate_bound(int a, const Hypervector& context, const Hypervector& reward_hv) {
    Hypervector& m = memories_[static_cast<std::size_t>(a)];
    require(context.dim() == m.dim() && reward_hv.dim() == m.dim(),
            "MemoryBank: dimension mismatch");
    for (int i = 0; i < m.dim(); ++i) m[i] += context[i] * reward_hv[i];
    refresh_norm(a);
  }

  // memory_a = (1 - rate) * memory_a + rate * context
  void blend(int a, const Hypervector& context, double rate) {
    Hypervector& m = memories_[static_cast<std::size_t>(a)];
    require(context.dim() == m.dim(), "MemoryBank: dimension mismatch");
    for (int i = 0; i < m.dim(); ++i) m[i] = (1.0 - rate) * m[i] + rate * context[i];
    refresh_norm(a);
  }

  // Overwrite the masked positions of memory_a with the context's values.
  void overwrite_masked(int a, const Hypervector& context, const ThinningMask& mask) {
    Hypervector& m = memories_[static_cast<std::size_t>(a)];
    require(context.dim() == m.dim() && mask.dim == m.dim(), "MemoryBank: dimension mismatch");
    for (int pos : mask.positions) m[pos] = context[pos];
    refresh_norm(a);
  }

  double score(int a, const Hypervector& context, double context_norm2) const {
    return detail::cosine_from_parts(dot(at(a), context), norm2_of(a), context_norm2);
  }

 private:
  void refresh_norm(int a) { norm2_[static_cast<std::size_t>(a)] = norm2(at(a)); }

  std::vector<Hypervector> memories_;
  std::vector<double> norm2_;
};

// Per-arm context norms; computed once when every arm shares one context.
class ContextNorms {
 public:
  explicit ContextNorms(const EncodedContextView& ctx) : ctx_(ctx) {
    if (ctx.shared()) shared_norm2_ = norm2(ctx.arm(0));
  }
  double norm2_of(int a) const { return ctx_.shared() ? shared_norm2_ : norm2(ctx_.arm(a)); }

 private:
  const EncodedContextView& ctx_;
  double shared_norm2_ = 0.0;
};

}  // namespace detail

class HdEpsPolicy {
 public:
  HdEpsPolicy(int n_actions, int dim, double epsilon)
      : epsilon_(epsilon), memories_(n_actions, dim) {
    require(n_actions >= 1, "HdEpsPolicy: need at least one action");
    require(epsilon >= 0.0 && epsilon <= 1.0, "HdEpsPolicy: epsilon must lie in [0,1]");
  }

  PolicyDecision select(const EncodedContextView& contexts, Rng& rng) const {
    require(contexts.n_actions() == memories_.size(), "select: arm count mismatch");
    PolicyDecision decision;
    decision.scores = payoffs(contexts);
    if (rng.uniform01() < epsilon_) {
      decision.action = rng.uniform_int(memories_.size());
      decision.explored = true;
    } else {
      decision.action = argmax_lowest(decision.scores);
    }
    return decision;
  }

  void update(int action, const Hypervector& context, double reward, const RewardEncoder& enc) {
    require(action >= 0 && action < memories_.size(), "update: action out of range");
    encode_reward_into(reward, enc, reward_hv_);
    memories_.accumulate_bound(action, context, reward_hv_);
  }

  int n_actions() const { return memories_.size(); }
  int dim() const { return memories_.dim(); }
  double epsilon() const { return epsilon_; }
  const Hypervector& memory(int a) const { return memories_.at(a); }
  std::span<const Hypervector> memories() const { return memories_.all(); }
  void set_memory(int a, Hypervector v) { memories_.set(a, std::move(v)); }

 private:
  std::vector<double> payoffs(const EncodedContextView& contexts) const {
    detail::ContextNorms norms(contexts);
    std::vector<double> scores(static_cast<std::size_t>(contexts.n_actions()));
    for (int a = 0; a < contexts.n_actions(); ++a) {
      scores[static_cast<std::size_t>(a)] = memories_.score(a, contexts.arm(a), norms.norm2_of(a));
    }
    return scores;
  }

  double epsilon_;
  detail::MemoryBank memories_;
  Hypervector reward_hv_;
};

class HdUnc1Policy {
 public:
  HdUnc1Policy(int n_actions, int dim, double alpha, double alpha2)
      : alpha_(alpha), alpha2_(alpha2), memories_(n_actions, dim), confidence_(n_actions, dim) {
    require(n_actions >= 1, "HdUnc1Policy: need at least one action");
    require(alpha >= 0.0, "HdUnc1Policy: alpha must be >= 0");
    require(alpha2 >= 0.0 && alpha2 <= 1.0, "HdUnc1Policy: alpha2 must lie in [0,1]");
  }

  // Deterministic: exploration comes entirely from the uncertainty term.
  PolicyDecision select(const EncodedContextView& contexts) const {
    require(contexts.n_actions() == memories_.size(), "select: arm count mismatch");
    detail::ContextNorms norms(contexts);
    PolicyDecision decision;
    decision.scores.resize(static_cast<std::size_t>(contexts.n_actions()));
    for (int a = 0; a < contexts.n_actions(); ++a) {
      const Hypervector& x = contexts.arm(a);
      const double nx2 = norms.norm2_of(a);
      const double payoff = memories_.score(a, x, nx2);
      const double confidence = confidence_.score(a, x, nx2);
      const double uncertainty = 1.0 - detail::clamp01(confidence);
      decision.scores[static_cast<std::size_t>(a)] = payoff + alpha_ * uncertainty;
    }
    decision.action = argmax_lowest(decision.scores);
    return decision;
  }

  void update(int action, const Hypervector& context, double reward, const RewardEncoder& enc) {
    require(action >= 0 && action < memories_.size(), "update: action out of range");
    encode_reward_into(reward, enc, reward_hv_);
    memories_.accumulate_bound(action, context, reward_hv_);
    confidence_.blend(action, context, alpha2_);
  }

  int n_actions() const { return memories_.size(); }
  int dim() const { return memories_.dim(); }
  double alpha() const { return alpha_; }
  double alpha2() const { return alpha2_; }
  const Hypervector& memory(int a) const { return memories_.at(a); }
  const Hypervector& confidence_memory(int a) const { return confidence_.at(a); }
  std::span<const Hypervector> memories() const { return memories_.all(); }
  void set_memory(int a, Hypervector v) { memories_.set(a, std::move(v)); }
  void set_confidence_memory(int a, Hypervector v) { confidence_.set(a, std::move(v)); }

 private:
  double alpha_;
  double alpha2_;
  detail::MemoryBank memories_;
  detail::MemoryBank confidence_;
  Hypervector reward_hv_;
};

class HdUnc2Policy {
 public:
  HdUnc2Policy(int n_actions, int dim, double alpha)
      : alpha_(alpha), memories_(n_actions, dim), confidence_(n_actions, dim) {
    require(n_actions >= 1, "HdUnc2Policy: need at least one action");
    require(alpha >= 0.0, "HdUnc2Policy: alpha must be >= 0");
  }

  // Same selection rule as unc1; additionally reports the chosen arm's raw
  // confidence so the caller can feed the thinning update.
  SelectOutcome select(const EncodedContextView& contexts) const {
    require(contexts.n_actions() == memories_.size(), "select: arm count mismatch");
    detail::ContextNorms norms(contexts);
    SelectOutcome out;
    out.decision.scores.resize(static_cast<std::size_t>(contexts.n_actions()));
    std::vector<double> raw_confidence(static_cast<std::size_t>(contexts.n_actions()));
    for (int a = 0; a < contexts.n_actions(); ++a) {
      const Hypervector& x = contexts.arm(a);
      const double nx2 = norms.norm2_of(a);
      const double payoff = memories_.score(a, x, nx2);
      const double confidence = confidence_.score(a, x, nx2);
      raw_confidence[static_cast<std::size_t>(a)] = confidence;
      out.decision.scores[static_cast<std::size_t>(a)] =
          payoff + alpha_ * (1.0 - detail::clamp01(confidence));
    }
    out.decision.action = argmax_lowest(out.decision.scores);
    out.confidence = raw_confidence[static_cast<std::size_t>(out.decision.action)];
    return out;
  }

  // confidence is the value reported by select for the chosen arm. The mask
  // covers floor(clamp(confidence,0,1) * D) positions; masked positions of
  // the confidence memory are overwritten with the context.
  void update(int action, const Hypervector& context, double reward, double confidence,
              const RewardEncoder& enc, Rng& rng) {
    require(action >= 0 && action < memories_.size(), "update: action out of range");
    encode_reward_into(reward, enc, reward_hv_);
    memories_.accumulate_bound(action, context, reward_hv_);
    const ThinningMask mask = draw_thinning_mask(confidence, dim(), rng);
    confidence_.overwrite_masked(action, context, mask);
  }

  int n_actions() const { return memories_.size(); }
  int dim() const { return memories_.dim(); }
  double alpha() const { return alpha_; }
  const Hypervector& memory(int a) const { return memories_.at(a); }
  const Hypervector& confidence_memory(int a) const { return confidence_.at(a); }
  std::span<const Hypervector> memories() const { return memories_.all(); }
  void set_memory(int a, Hypervector v) { memories_.set(a, std::move(v)); }
  void set_confidence_memory(int a, Hypervector v) { confidence_.set(a, std::move(v)); }

 private:
  double alpha_;
  detail::MemoryBank memories_;
  detail::MemoryBank confidence_;
  Hypervector reward_hv_;
};

// Context-action pair encoding: arm a applies the a-fold cyclic rotation, so
// every arm reads and writes a distinct, nearly orthogonal view of the shared
// memories.
inline Hypervector encode_action_pair(const Hypervector& context, int action) {
  require(action >= 0, "encode_action_pair: action must be >= 0");
  return permute(context, action);
}

class HdUnc3Policy {
 public:
  HdUnc3Policy(int n_actions, int dim, double alpha, double alpha2, bool thinning_update = false)
      : n_actions_(n_actions),
        alpha_(alpha),
        alpha2_(alpha2),
        thinning_update_(thinning_update),
        reward_memory_(2, dim),   // slot 0: reward memory, slot 1: confidence memory
        pair_scratch_(dim) {
    require(n_actions >= 1, "HdUnc3Policy: need at least one action");
    require(alpha >= 0.0, "HdUnc3Policy: alpha must be >= 0");
    require(alpha2 >= 0.0 && alpha2 <= 1.0, "HdUnc3Policy: alpha2 must lie in [0,1]");
  }

  SelectOutcome select(const EncodedContextView& contexts) const {
    require(contexts.n_actions() == n_actions_, "select: arm count mismatch");
    SelectOutcome out;
    out.decision.scores.resize(static_cast<std::size_t>(n_actions_));
    std::vector<double> raw_confidence(static_cast<std::size_t>(n_actions_));
    for (int a = 0; a < n_actions_; ++a) {
      permute_into(contexts.arm(a), a, pair_scratch_);
      const double ns2 = norm2(pair_scratch_);
      const double payoff = reward_memory_.score(0, pair_scratch_, ns2);
      const double confidence = reward_memory_.score(1, pair_scratch_, ns2);
      raw_confidence[static_cast<std::size_t>(a)] = confidence;
      out.decision.scores[static_cast<std::size_t>(a)] =
          payoff + alpha_ * (1.0 - detail::clamp01(confidence));
    }
    out.decision.action = argmax_lowest(out.decision.scores);
    out.confidence = raw_confidence[static_cast<std::size_t>(out.decision.action)];
    return out;
  }

  // confidence and rng are consumed only when the thinning update replaces
  // the moving average.
  void update(int action, const Hypervector& context, double reward, double confidence,
              const RewardEncoder& enc, Rng& rng) {
    require(action >= 0 && action < n_actions_, "update: action out of range");
    permute_into(context, action, pair_scratch_);
    encode_reward_into(reward, enc, reward_hv_);
    reward_memory_.accumulate_bound(0, pair_scratch_, reward_hv_);
    if (thinning_update_) {
      const ThinningMask mask = draw_thinning_mask(confidence, dim(), rng);
      reward_memory_.overwrite_masked(1, pair_scratch_, mask);
    } else {
      reward_memory_.blend(1, pair_scratch_, alpha2_);
    }
  }

  int n_actions() const { return n_actions_; }
  int dim() const { return reward_memory_.dim(); }
  double alpha() const { return alpha_; }
  double alpha2() const { return alpha2_; }
  bool thinning_update() const { return thinning_update_; }
  const Hypervector& global_reward_memory() const { return reward_memory_.at(0); }
  const Hypervector& global_confidence_memory() const { return reward_memory_.at(1); }
  // Total learned state, in doubles; independent of the number of actions.
  int state_size() const { return 2 * dim(); }
  void set_global_reward_memory(Hypervector v) { reward_memory_.set(0, std::move(v)); }
  void set_global_confidence_memory(Hypervector v) { reward_memory_.set(1, std::move(v)); }

 private:
  int n_actions_;
  double alpha_;
  double alpha2_;
  bool thinning_update_;
  detail::MemoryBank reward_memory_;
  mutable Hypervector pair_scratch_;
  Hypervector reward_hv_;
};

}  // namespace hdcb
