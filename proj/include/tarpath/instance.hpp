#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tarpath/pathspace.hpp"
#include "tarpath/rng.hpp"

namespace tarpath {

/// Conditional law of an observed yield given its path.
struct NoiseModel {
    enum class Kind { Noiseless, Bernoulli, TruncatedGaussian };

    Kind kind = Kind::Bernoulli;
    double stddev = 0.0;  // TruncatedGaussian only

    static NoiseModel noiseless() { return {Kind::Noiseless, 0.0}; }
    static NoiseModel bernoulli() { return {Kind::Bernoulli, 0.0}; }
    /// Rejection-sampled onto [0,1]; the conditional mean is NOT recentred after truncation.
    static NoiseModel truncated_gaussian(double stddev);

    /// True when Var(y | path) has a closed form (Noiseless, Bernoulli).
    [[nodiscard]] bool analytic_variance() const noexcept { return kind != Kind::TruncatedGaussian; }

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// An offline path-learning problem: alphabet, feasible paths with yields,
/// the logging distribution over paths, and the observation noise.
class PLInstance {
public:
    /// `weights` may be empty, meaning uniform over the yield table's keys.
    /// Throws InvalidInstance on any broken invariant.
    PLInstance(ActionAlphabet alphabet, std::map<PathSeq, double> yields, std::map<PathSeq, double> weights,
               NoiseModel noise);

    [[nodiscard]] const ActionAlphabet& alphabet() const noexcept { return alphabet_; }
    [[nodiscard]] const std::map<PathSeq, double>& yields() const noexcept { return yields_; }
    [[nodiscard]] const std::map<PathSeq, double>& weights() const noexcept { return weights_; }
    [[nodiscard]] const NoiseModel& noise() const noexcept { return noise_; }

    /// Feasible paths in canonical (lexicographic) order.
    [[nodiscard]] std::vector<PathSeq> feasible_paths() const;

    [[nodiscard]] bool feasible(const PathSeq& seq) const { return yields_.contains(seq); }

    /// J(seq): the table entry, or 0 off the feasible set. No token validation.
    [[nodiscard]] double yield(const PathSeq& seq) const;

    /// P(seq) under the logging distribution (0 off its support).
    [[nodiscard]] double weight(const PathSeq& seq) const;

    /// Every feasible path has positive logging probability.
    [[nodiscard]] bool full_support() const;

    [[nodiscard]] std::size_t max_path_length() const;

    friend bool operator==(const PLInstance&, const PLInstance&) = default;

private:
    ActionAlphabet alphabet_;
    std::map<PathSeq, double> yields_;
    std::map<PathSeq, double> weights_;
    NoiseModel noise_;
};

struct PathYieldPair {
    PathSeq path;
    double y = 0.0;

    friend bool operator==(const PathYieldPair&, const PathYieldPair&) = default;
};

struct PathYieldDataset {
    std::vector<PathYieldPair> pairs;
    std::uint64_t seed = 0;

    friend bool operator==(const PathYieldDataset&, const PathYieldDataset&) = default;
};

/// J(seq) after validating tokens; 0 for anything outside the feasible set.
[[nodiscard]] double yield_of(const PLInstance& instance, const PathSeq& seq);

/// One draw of y ~ P_Y(path); exactly 0 when path is infeasible.
[[nodiscard]] double sample_yield(const PLInstance& instance, const PathSeq& path, Rng& rng);

/// Draws a path from the logging distribution.
[[nodiscard]] const PathSeq& sample_path(const PLInstance& instance, Rng& rng);

/// n i.i.d. path-yield pairs. Throws InvalidInstance on an empty feasible set.
[[nodiscard]] PathYieldDataset sample_dataset(const PLInstance& instance, std::size_t n, std::uint64_t seed);

/// Var(y | path). Throws Unsupported for the truncated Gaussian.
[[nodiscard]] double conditional_variance(const PLInstance& instance, const PathSeq& path);

/// Expected conditional variance of observed yields under the logging distribution.
[[nodiscard]] double noise_variance(const PLInstance& instance);

struct RandomInstanceSpec {
    std::size_t alphabet_size = 3;  // including the terminal
    std::size_t max_depth = 3;      // non-terminal steps; paths have length <= max_depth + 1
    std::size_t path_count = 5;
    double yield_min = 0.0;
    double yield_max = 1.0;
    NoiseModel noise = NoiseModel::bernoulli();
};

/// Distinct complete paths over a letter alphabet with uniform yields and a
/// uniform logging distribution. Throws Generator when the spec is unsatisfiable.
[[nodiscard]] PLInstance random_instance(const RandomInstanceSpec& spec, std::uint64_t seed);

/// {a,b,END}; (a,END) -> 0.8, (b,END) -> 0.3; uniform logging.
[[nodiscard]] PLInstance fixture_e1(NoiseModel noise = NoiseModel::noiseless());

/// {a,b,END}; (a,a,END) -> 0.9, (a,b,END) -> 0.2, (b,END) -> 0.5; uniform logging.
[[nodiscard]] PLInstance fixture_e2(NoiseModel noise = NoiseModel::noiseless());

}  // namespace tarpath
