#pragma once

// Brute-force reference values computed straight from the feasible set, with
// no trie and no backward induction. Kept independent of src/oracle.cpp.

#include <algorithm>

#include "tarpath/instance.hpp"

namespace tarpath::testing {

inline bool has_prefix(const PathSeq& seq, const PathSeq& prefix) {
    return prefix.size() <= seq.size() && std::equal(prefix.begin(), prefix.end(), seq.begin());
}

/// max over all continuations b of J(s ⊕ b); the empty and infeasible
/// continuations contribute J(s) and 0.
inline double best_completion(const PLInstance& instance, const PathSeq& s) {
    double best = 0.0;
    for (const auto& [path, y] : instance.yields())
        if (has_prefix(path, s)) best = std::max(best, y);
    return best;
}

/// Drawdown of the best-case yield from committing to `a` at `s`.
inline double enumerated_advantage(const PLInstance& instance, const PathSeq& s, TokenId a) {
    PathSeq next = s;
    next.elems.push_back(a);
    return best_completion(instance, next) - best_completion(instance, s);
}

inline double max_yield(const PLInstance& instance) {
    double best = 0.0;
    for (const auto& [path, y] : instance.yields()) best = std::max(best, y);
    return best;
}

}  // namespace tarpath::testing
