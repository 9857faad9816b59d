#include "tarpath/oracle.hpp"

#include <algorithm>

#include "tarpath/errors.hpp"

namespace tarpath {

OptimalValues::OptimalValues(ActionAlphabet alphabet, PrefixTrie trie, std::vector<double> node_yield,
                             std::vector<bool> feasible, std::vector<double> v, std::vector<double> q)
    : alphabet_(std::move(alphabet)),
      trie_(std::move(trie)),
      node_yield_(std::move(node_yield)),
      feasible_(std::move(feasible)),
      v_(std::move(v)),
      q_(std::move(q)) {}

double OptimalValues::value(const PathSeq& s) const {
    const NodeId n = trie_.find(s);
    return n == PrefixTrie::npos ? 0.0 : v(n);
}

double OptimalValues::action_value(const PathSeq& s, TokenId a) const {
    const NodeId n = trie_.find(s);
    return n == PrefixTrie::npos ? 0.0 : q(n, a);
}

double OptimalValues::advantage(const PathSeq& s, TokenId a) const {
    const NodeId n = trie_.find(s);
    return n == PrefixTrie::npos ? 0.0 : adv(n, a);
}

OptimalValues compute_optimal(const PLInstance& instance) {
    if (instance.yields().empty()) fail(ErrorKind::InvalidInstance, "optimal values need a nonempty feasible set");
    const ActionAlphabet& alphabet = instance.alphabet();
    const std::vector<PathSeq> paths = instance.feasible_paths();
    PrefixTrie trie = PrefixTrie::build(alphabet, paths);

    const std::size_t n_nodes = trie.size();
    const std::size_t n_tok = alphabet.size();
    std::vector<double> node_yield(n_nodes, 0.0);
    std::vector<bool> feasible(n_nodes, false);
    for (const auto& [path, y] : instance.yields()) {
        const auto n = static_cast<std::size_t>(trie.find(path));
        node_yield[n] = y;
        feasible[n] = true;
    }

    std::vector<double> v(n_nodes, 0.0);
    std::vector<double> q(n_nodes * n_tok, 0.0);
    // Children carry larger ids than parents.
    for (std::size_t i = n_nodes; i-- > 0;) {
        const auto node = static_cast<PrefixTrie::NodeId>(i);
        const double reward = feasible[i] ? node_yield[i] : 0.0;
        double best = 0.0;
        for (TokenId a = 0; a < n_tok; ++a) {
            const auto child = trie.child(node, a);
            const double next = child == PrefixTrie::npos ? 0.0 : v[static_cast<std::size_t>(child)];
            const double qa = reward + next;
            q[i * n_tok + a] = qa;
            best = std::max(best, qa);
        }
        v[i] = best;
    }
    return OptimalValues(alphabet, std::move(trie), std::move(node_yield), std::move(feasible), std::move(v),
                         std::move(q));
}

double transition_operator(const std::function<double(const PathSeq&)>& values, const PLInstance& instance,
                           const PathSeq& s, TokenId a) {
    return instance.yield(s) + values(append(instance.alphabet(), s, a));
}

double check_decomposition(const OptimalValues& ov, const PathSeq& seq) {
    const double v = ov.value(seq);
    if (!is_proper(classify(ov.alphabet(), seq))) return v;

    const PrefixTrie& trie = ov.trie();
    double acc = ov.j_star();
    auto node = trie.root();
    for (TokenId a : seq) {
        // Off the trie every advantage is exactly 0.
        if (node == PrefixTrie::npos) break;
        acc += ov.adv(node, a);
        node = trie.child(node, a);
    }
    return v - acc;
}

std::vector<TokenId> greedy_policy(const OptimalValues& ov) {
    const std::size_t n_tok = ov.alphabet().size();
    std::vector<TokenId> policy(ov.trie().size(), 0);
    for (std::size_t i = 0; i < policy.size(); ++i) {
        const auto node = static_cast<PrefixTrie::NodeId>(i);
        TokenId best = 0;
        for (TokenId a = 1; a < n_tok; ++a)
            if (ov.q(node, a) > ov.q(node, best)) best = a;
        policy[i] = best;
    }
    return policy;
}

Policy as_policy(const OptimalValues& ov, std::vector<TokenId> per_node) {
    return [&ov, table = std::move(per_node)](const PathSeq& s) -> std::optional<TokenId> {
        const auto n = ov.trie().find(s);
        if (n == PrefixTrie::npos) return ov.alphabet().terminal();
        return table[static_cast<std::size_t>(n)];
    };
}

}  // namespace tarpath
