#include "tarpath/reduction.hpp"

#include "tarpath/errors.hpp"

namespace tarpath {

double ReducedMDP::marginal(const PathSeq& s, TokenId a) const {
    alphabet().check(a);
    return instance_->weight(s) / static_cast<double>(alphabet().size());
}

PathSeq transition(const ActionAlphabet& alphabet, const PathSeq& s, TokenId a) { return append(alphabet, s, a); }

double sample_reward(const ReducedMDP& mdp, const PathSeq& s, TokenId a, Rng& rng) {
    mdp.alphabet().check(a);
    (void)classify(mdp.alphabet(), s);
    return sample_yield(mdp.instance(), s, rng);
}

RLDataset build_offline_dataset(const PLInstance& instance, const PathYieldDataset& data, std::uint64_t seed) {
    const ActionAlphabet& alphabet = instance.alphabet();
    RLDataset out;
    out.seed = seed;
    out.transitions.reserve(data.pairs.size());
    Rng rng(seed);
    for (const auto& [path, y] : data.pairs) {
        if (!instance.feasible(path))
            fail(ErrorKind::InvalidInput, "dataset path " + format(alphabet, path) + " is not feasible for the instance");
        const auto a = static_cast<TokenId>(rng.index(alphabet.size()));
        out.transitions.push_back({path, a, y, append(alphabet, path, a)});
    }
    return out;
}

RolloutResult rollout_greedy(const Policy& policy, const ReducedMDP& mdp, std::size_t max_steps) {
    const ActionAlphabet& alphabet = mdp.alphabet();
    RolloutResult result;
    for (std::size_t step = 0; step < max_steps; ++step) {
        const std::optional<TokenId> a = policy(result.path);
        if (!a) fail(ErrorKind::Rollout, "policy undefined at state " + format(alphabet, result.path));
        result.path = append(alphabet, result.path, *a);
        if (alphabet.is_terminal(*a)) return result;
    }
    result.truncated = true;
    return result;
}

}  // namespace tarpath
