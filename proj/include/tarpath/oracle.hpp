#pragma once

#include <functional>
#include <vector>

#include "tarpath/instance.hpp"
#include "tarpath/reduction.hpp"

namespace tarpath {

/// Exact optimal values of the reduced MDP, materialized on the prefix trie of
/// the feasible set. States off the trie have no feasible completion, so their
/// optimal value is 0 and every action there has advantage 0.
class OptimalValues {
public:
    using NodeId = PrefixTrie::NodeId;

    OptimalValues(ActionAlphabet alphabet, PrefixTrie trie, std::vector<double> node_yield, std::vector<bool> feasible,
                  std::vector<double> v, std::vector<double> q);

    [[nodiscard]] const ActionAlphabet& alphabet() const noexcept { return alphabet_; }
    [[nodiscard]] const PrefixTrie& trie() const noexcept { return trie_; }
    [[nodiscard]] double j_star() const noexcept { return v_[0]; }

    [[nodiscard]] double v(NodeId n) const { return v_[static_cast<std::size_t>(n)]; }
    [[nodiscard]] double q(NodeId n, TokenId a) const { return q_[static_cast<std::size_t>(n) * alphabet_.size() + a]; }
    [[nodiscard]] double adv(NodeId n, TokenId a) const { return q(n, a) - v(n); }
    [[nodiscard]] bool feasible(NodeId n) const { return feasible_[static_cast<std::size_t>(n)]; }

    /// V*(s) for any sequence.
    [[nodiscard]] double value(const PathSeq& s) const;
    /// Q*(s, a) for any sequence.
    [[nodiscard]] double action_value(const PathSeq& s, TokenId a) const;
    /// A*(s, a) = Q*(s, a) - V*(s) for any sequence.
    [[nodiscard]] double advantage(const PathSeq& s, TokenId a) const;

private:
    ActionAlphabet alphabet_;
    PrefixTrie trie_;
    std::vector<double> node_yield_;
    std::vector<bool> feasible_;
    std::vector<double> v_;
    std::vector<double> q_;  // row-major [node][token]
};

/// Backward induction over the trie: V*(s) = max(J(s) if feasible, max_a V*(s ⊕ a)),
/// with V* = 0 one step off the trie. Throws InvalidInstance on an empty feasible set.
[[nodiscard]] OptimalValues compute_optimal(const PLInstance& instance);

/// (T f)(s, a) = E[r + f(s ⊕ a)] = J(s)·[s feasible] + f(s ⊕ a).
[[nodiscard]] double transition_operator(const std::function<double(const PathSeq&)>& values,
                                         const PLInstance& instance, const PathSeq& s, TokenId a);

/// V*(seq) minus its advantage decomposition (J* + sum of step advantages on
/// proper sequences, 0 on improper ones).
[[nodiscard]] double check_decomposition(const OptimalValues& ov, const PathSeq& seq);

/// Per trie node, the first token in alphabet order that maximizes Q*.
[[nodiscard]] std::vector<TokenId> greedy_policy(const OptimalValues& ov);

/// Lifts a per-node policy to all states. Off the trie nothing is reachable, so
/// the policy emits the terminal token there.
[[nodiscard]] Policy as_policy(const OptimalValues& ov, std::vector<TokenId> per_node);

}  // namespace tarpath
