#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tarpath/instance.hpp"

namespace tarpath {

/// Reinforcement-learning view of a path-learning instance. States are token
/// sequences, the initial state is the empty sequence, transitions append the
/// chosen action, and the reward at a state is its noisy yield (0 off the
/// feasible set). Everything is derived on demand from the wrapped instance.
class ReducedMDP {
public:
    explicit ReducedMDP(const PLInstance& instance) : instance_(&instance) {}

    [[nodiscard]] const PLInstance& instance() const noexcept { return *instance_; }
    [[nodiscard]] const ActionAlphabet& alphabet() const noexcept { return instance_->alphabet(); }
    [[nodiscard]] PathSeq initial_state() const { return {}; }

    /// Mean reward of (s, a): J(s) on the feasible set, else 0. Independent of a.
    [[nodiscard]] double mean_reward(const PathSeq& s) const { return instance_->yield(s); }

    /// Logging marginal over (s, a): P_Psi(s) times uniform over actions.
    [[nodiscard]] double marginal(const PathSeq& s, TokenId a) const;

private:
    const PLInstance* instance_;
};

struct RLTransition {
    PathSeq s;
    TokenId a = 0;
    double r = 0.0;
    PathSeq s_next;

    friend bool operator==(const RLTransition&, const RLTransition&) = default;
};

struct RLDataset {
    std::vector<RLTransition> transitions;
    std::uint64_t seed = 0;

    friend bool operator==(const RLDataset&, const RLDataset&) = default;
};

/// s ⊕ a.
[[nodiscard]] PathSeq transition(const ActionAlphabet& alphabet, const PathSeq& s, TokenId a);

/// Draw from the reward law at (s, a); exactly 0 unless s is feasible.
[[nodiscard]] double sample_reward(const ReducedMDP& mdp, const PathSeq& s, TokenId a, Rng& rng);

/// One transition (psi_i, a_i, y_i, psi_i ⊕ a_i) per pair with a_i uniform over
/// the alphabet. Throws InvalidInput if a pair's path is not a feasible path.
[[nodiscard]] RLDataset build_offline_dataset(const PLInstance& instance, const PathYieldDataset& data,
                                              std::uint64_t seed);

/// A deterministic policy; nullopt means "undefined at this state".
using Policy = std::function<std::optional<TokenId>(const PathSeq&)>;

struct RolloutResult {
    PathSeq path;
    bool truncated = false;
};

/// Follows `policy` from the empty sequence until it emits the terminal token or
/// `max_steps` actions were taken. Throws Rollout when the policy is undefined at
/// a reached state.
[[nodiscard]] RolloutResult rollout_greedy(const Policy& policy, const ReducedMDP& mdp, std::size_t max_steps);

}  // namespace tarpath
