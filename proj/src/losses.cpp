#include "tarpath/losses.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>

#include "tarpath/errors.hpp"
#include "tarpath/oracle.hpp"

namespace tarpath {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

// Fixed-order pairwise reduction; bit-reproducible regardless of how the terms were produced.
double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double hinge(double x) { return x > 0.0 ? x : 0.0; }

// E_{P0}[V] + kappa E_{P0}[{-V}_+^2], pushed into `terms` and `grad`.
void add_state_terms(const AdvantageModel& model, const StateWeighting& p0, double kappa, std::vector<double>& terms,
                     std::span<double> grad) {
    for (std::size_t i = 0; i < p0.states.size(); ++i) {
        const double w = p0.weights[i];
        const double v = accumulate_value_gradient(model, p0.states[i], w, grad);
        terms.push_back(w * v);
        if (kappa > 0.0 && v < 0.0) {
            terms.push_back(kappa * w * v * v);
            (void)accumulate_value_gradient(model, p0.states[i], 2.0 * kappa * w * v, grad);
        }
    }
}

// weight * {(T V)(s,a) - V(s)}_+^2 with (T V)(s,a) = J(s) + V(s ⊕ a).
void add_bellman_term(const AdvantageModel& model, const PLInstance& instance, const PathSeq& s, TokenId a,
                      double weight, std::vector<double>& terms, std::span<double> grad) {
    const PathSeq next = append(instance.alphabet(), s, a);
    const double v_s = predict_value(model, s);
    const double v_next = predict_value(model, next);
    const double h = hinge(instance.yield(s) + v_next - v_s);
    if (h == 0.0) return;
    terms.push_back(weight * h * h);
    (void)accumulate_value_gradient(model, next, 2.0 * weight * h, grad);
    (void)accumulate_value_gradient(model, s, -2.0 * weight * h, grad);
}

}  // namespace

StateWeighting StateWeighting::uniform_over_trie(const PrefixTrie& trie) {
    std::vector<PathSeq> states;
    states.reserve(trie.size());
    for (std::size_t i = 0; i < trie.size(); ++i) states.push_back(trie.path(static_cast<PrefixTrie::NodeId>(i)));
    return uniform(std::move(states));
}

StateWeighting StateWeighting::uniform(std::vector<PathSeq> states) {
    StateWeighting p0;
    p0.weights.assign(states.size(), states.empty() ? 0.0 : 1.0 / static_cast<double>(states.size()));
    p0.states = std::move(states);
    return p0;
}

void StateWeighting::validate(const ActionAlphabet& alphabet) const {
    if (states.size() != weights.size()) fail(ErrorKind::InvalidInput, "state weighting: size mismatch");
    if (states.empty()) fail(ErrorKind::InvalidInput, "state weighting is empty");
    std::set<PathSeq> seen;
    double total = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!is_proper(classify(alphabet, states[i])))
            fail(ErrorKind::InvalidInput, "state weighting holds improper state " + format(alphabet, states[i]));
        if (!seen.insert(states[i]).second)
            fail(ErrorKind::InvalidInput, "state weighting repeats " + format(alphabet, states[i]));
        if (!(weights[i] >= 0.0)) fail(ErrorKind::InvalidInput, "state weighting has a negative weight");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance) fail(ErrorKind::InvalidInput, "state weights do not sum to 1");
}

PenaltyMix PenaltyMix::fringe(const PLInstance& instance) {
    const ActionAlphabet& alphabet = instance.alphabet();
    const std::vector<PathSeq> paths = instance.feasible_paths();
    const PrefixTrie trie = PrefixTrie::build(alphabet, paths);
    std::vector<PathSeq> fringe;
    for (std::size_t i = 0; i < trie.size(); ++i) {
        const auto node = static_cast<PrefixTrie::NodeId>(i);
        for (TokenId a = 0; a < alphabet.size(); ++a) {
            if (trie.child(node, a) != PrefixTrie::npos) continue;
            PathSeq s = append(alphabet, trie.path(node), a);
            // At a complete state outside the feasible set the successor is
            // improper, so the hinge reads {-V(s)}_+ rather than {A(s,a)}_+.
            if (classify(alphabet, s) == SeqClass::Complete) continue;
            fringe.push_back(std::move(s));
        }
    }
    PenaltyMix mix;
    const double w = fringe.empty() ? 0.0 : 1.0 / static_cast<double>(fringe.size() * alphabet.size());
    for (const auto& s : fringe)
        for (TokenId a = 0; a < alphabet.size(); ++a) mix.tilde.push_back({s, a, w});
    return mix;
}

void PenaltyMix::validate(const PLInstance& instance) const {
    if (!(mu_weight >= 0.0 && mu_weight <= 1.0)) fail(ErrorKind::InvalidInput, "penalty mix weight outside [0,1]");
    double total = 0.0;
    for (const auto& e : tilde) {
        (void)classify(instance.alphabet(), e.s);
        instance.alphabet().check(e.a);
        if (instance.feasible(e.s))
            fail(ErrorKind::InvalidInput,
                 "penalty mix state " + format(instance.alphabet(), e.s) + " lies in the feasible set");
        if (!(e.weight >= 0.0)) fail(ErrorKind::InvalidInput, "penalty mix has a negative weight");
        total += e.weight;
    }
    if (!tilde.empty() && std::abs(total - 1.0) > kWeightSumTolerance)
        fail(ErrorKind::InvalidInput, "penalty mix weights do not sum to 1");
}

RegressionTargets RegressionTargets::empirical(const ActionAlphabet& alphabet, const PathYieldDataset& data) {
    if (data.pairs.empty()) fail(ErrorKind::InvalidInput, "empirical loss needs a nonempty dataset");
    std::map<PathSeq, std::vector<double>> groups;
    for (const auto& [path, y] : data.pairs) {
        (void)classify(alphabet, path);
        groups[path].push_back(y);
    }
    const double n = static_cast<double>(data.pairs.size());
    RegressionTargets out;
    for (const auto& [path, ys] : groups) {
        double mean = 0.0;
        for (double y : ys) mean += y;
        mean /= static_cast<double>(ys.size());
        double var = 0.0;
        for (double y : ys) var += (y - mean) * (y - mean);
        var /= static_cast<double>(ys.size());
        out.items.push_back({path, static_cast<double>(ys.size()) / n, mean, var});
    }
    return out;
}

RegressionTargets RegressionTargets::exact(const PLInstance& instance) {
    RegressionTargets out;
    for (const auto& [path, w] : instance.weights()) {
        if (w == 0.0) continue;
        out.items.push_back({path, w, instance.yield(path), conditional_variance(instance, path)});
    }
    return out;
}

LossValue tar_loss(const AdvantageModel& model, const StateWeighting& p0, const RegressionTargets& targets,
                   double lambda, double kappa) {
    p0.validate(model.alphabet());
    LossValue out;
    out.grad.assign(model.parameter_count(), 0.0);
    std::vector<double> terms;
    terms.reserve(p0.states.size() + targets.items.size());
    add_state_terms(model, p0, kappa, terms, out.grad);

    for (const auto& t : targets.items) {
        const double r = t.mean - predict_value(model, t.path);
        terms.push_back(0.5 * lambda * t.weight * (r * r + t.variance));
        (void)accumulate_value_gradient(model, t.path, -lambda * t.weight * r, out.grad);
    }
    out.loss = pairwise_sum(terms);
    return out;
}

LossValue vlp_loss(const AdvantageModel& model, const StateWeighting& p0, const PenaltyMix& mix,
                   const PLInstance& instance, double lambda, double kappa) {
    p0.validate(model.alphabet());
    mix.validate(instance);
    if (!(model.alphabet() == instance.alphabet())) fail(ErrorKind::InvalidInput, "model and instance alphabets differ");
    const ActionAlphabet& alphabet = instance.alphabet();

    LossValue out;
    out.grad.assign(model.parameter_count(), 0.0);
    std::vector<double> terms;
    add_state_terms(model, p0, kappa, terms, out.grad);

    const double per_action = 1.0 / static_cast<double>(alphabet.size());
    for (const auto& [path, w] : instance.weights()) {
        if (w == 0.0) continue;
        for (TokenId a = 0; a < alphabet.size(); ++a)
            add_bellman_term(model, instance, path, a, lambda * mix.mu_weight * w * per_action, terms, out.grad);
    }
    for (const auto& e : mix.tilde) {
        if (e.weight == 0.0) continue;
        add_bellman_term(model, instance, e.s, e.a, lambda * (1.0 - mix.mu_weight) * e.weight, terms, out.grad);
    }
    out.loss = pairwise_sum(terms);
    return out;
}

LossIdentityGap loss_identity_gap(const AdvantageModel& model, const PLInstance& instance, const StateWeighting& p0,
                         const PenaltyMix& mix, double lambda, double kappa) {
    if (mix.mu_weight != 0.5) fail(ErrorKind::InvalidInput, "the identity needs half the penalty mass on the marginal");
    if (!instance.noise().analytic_variance())
        fail(ErrorKind::Unsupported, "the identity is checked only for noiseless or Bernoulli noise");

    LossIdentityGap g;
    g.full_support = instance.full_support();
    g.lhs = tar_loss(model, p0, RegressionTargets::exact(instance), lambda, kappa).loss;
    g.vlp = vlp_loss(model, p0, mix, instance, lambda, kappa).loss;
    g.sigma2_term = 0.5 * lambda * noise_variance(instance);

    const OptimalValues ov = compute_optimal(instance);
    std::vector<double> excess;
    for (const auto& [path, w] : instance.weights()) {
        const double h = hinge(predict_value(model, path) - ov.value(path));
        excess.push_back(w * h * h);
    }
    g.hinge_excess_term = 0.5 * lambda * pairwise_sum(excess);
    g.rhs = g.sigma2_term + g.vlp + g.hinge_excess_term;
    g.gap = std::abs(g.lhs - g.rhs);
    return g;
}

}  // namespace tarpath
