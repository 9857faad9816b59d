#pragma once

#include <vector>

#include "tarpath/instance.hpp"
#include "tarpath/model.hpp"

namespace tarpath {

/// Finite covering distribution over proper states, used for the E_{P0}[V] term.
struct StateWeighting {
    std::vector<PathSeq> states;
    std::vector<double> weights;

    /// Uniform over every node of `trie` (all proper prefixes plus the empty sequence).
    static StateWeighting uniform_over_trie(const PrefixTrie& trie);
    static StateWeighting uniform(std::vector<PathSeq> states);

    /// Throws InvalidInput unless states are proper and distinct, weights are
    /// nonnegative and sum to 1 within 1e-12.
    void validate(const ActionAlphabet& alphabet) const;
};

/// Penalty distribution of the penalized V-LP loss: mu_weight times the logging
/// marginal (feasible path, uniform action) plus the rest on `tilde`, which must
/// avoid the feasible set.
struct PenaltyMix {
    struct Entry {
        PathSeq s;
        TokenId a = 0;
        double weight = 0.0;
    };

    double mu_weight = 0.5;
    std::vector<Entry> tilde;

    /// Uniform over (s, a) for every fringe state s (one step off the feasible
    /// trie) that is not a complete sequence, and every action a.
    static PenaltyMix fringe(const PLInstance& instance);

    void validate(const PLInstance& instance) const;
};

/// One least-squares term: weight * ((mean - V(path))^2 + variance).
/// Empirical data collapses repeated paths into one term; exact mode takes
/// the logging probability, the true yield and the conditional variance.
struct RegressionTarget {
    PathSeq path;
    double weight = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

struct RegressionTargets {
    std::vector<RegressionTarget> items;

    /// Empirical average over the pairs. Throws InvalidInput on an empty dataset.
    static RegressionTargets empirical(const ActionAlphabet& alphabet, const PathYieldDataset& data);
    /// Exact expectation under the logging distribution and noise model.
    /// Throws Unsupported for noise without analytic variance.
    static RegressionTargets exact(const PLInstance& instance);
};

struct LossValue {
    double loss = 0.0;
    std::vector<double> grad;
};

/// E_{P0}[V] + (lambda/2) E[(y - V(psi))^2] + kappa E_{P0}[{-V}_+^2].
[[nodiscard]] LossValue tar_loss(const AdvantageModel& model, const StateWeighting& p0,
                                 const RegressionTargets& targets, double lambda, double kappa);

/// E_{P0}[V] + lambda E_{P1}[{(T V)(s,a) - V(s)}_+^2] + kappa E_{P0}[{-V}_+^2],
/// with expectations taken exactly over the instance.
[[nodiscard]] LossValue vlp_loss(const AdvantageModel& model, const StateWeighting& p0, const PenaltyMix& mix,
                                 const PLInstance& instance, double lambda, double kappa);

/// Both sides of  L_TAR = lambda sigma^2 / 2 + L_VLP + (lambda/2) ||{V - V*}_+||^2
/// evaluated independently in exact mode.
struct LossIdentityGap {
    double lhs = 0.0;                // L_TAR
    double rhs = 0.0;                // sum of the three terms below
    double vlp = 0.0;                // L_VLP
    double sigma2_term = 0.0;        // lambda sigma^2 / 2
    double hinge_excess_term = 0.0;  // (lambda/2) E_{P_Psi}[{V - V*}_+^2]
    double gap = 0.0;                // |lhs - rhs|
    bool full_support = false;
};

/// Throws Unsupported for noise without analytic variance and InvalidInput if
/// the mix does not put exactly half its mass on the logging marginal.
[[nodiscard]] LossIdentityGap loss_identity_gap(const AdvantageModel& model, const PLInstance& instance,
                                       const StateWeighting& p0, const PenaltyMix& mix, double lambda,
                                       double kappa = 0.0);

}  // namespace tarpath
