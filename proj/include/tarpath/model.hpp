#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tarpath/oracle.hpp"
#include "tarpath/pathspace.hpp"
#include "tarpath/rng.hpp"

namespace tarpath {

/// log(1 + e^z), stable for large |z|.
[[nodiscard]] inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

[[nodiscard]] inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Advantage transform: A = -softplus(z) < 0 for every finite raw value.
[[nodiscard]] inline double advantage_from_raw(double z) { return -softplus(z); }

/// Raw value encoding the drawdown `a` (<= 0). Zero sits at the transform's
/// limit, so it is clamped to kZeroAdvantageRaw.
[[nodiscard]] double raw_from_advantage(double a);

inline constexpr double kZeroAdvantageRaw = -40.0;
inline constexpr double kDefaultFallbackDrawdown = 10.0;
inline constexpr double kDefaultInitialAdvantage = -0.1;

enum class FeatureKind { EdgePair, DepthEdgePair };

/// Indicator features for linear advantage models. EdgePair has one indicator
/// per (last token of s or "start", a) plus a bias; DepthEdgePair crosses the
/// pair indicators with a bucketed prefix length.
class FeatureMap {
public:
    static constexpr std::size_t kDepthBuckets = 4;

    FeatureMap(FeatureKind kind, std::size_t alphabet_size);

    [[nodiscard]] FeatureKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }

    /// Indices of the two active indicators (pair cell, bias) for action `a`
    /// taken after `last` at prefix length `depth`. `last` == alphabet size means start.
    [[nodiscard]] std::array<std::size_t, 2> active(TokenId last, std::size_t depth, TokenId a) const;

    /// Dense feature vector of (s, a).
    [[nodiscard]] std::vector<double> features(const PathSeq& s, TokenId a) const;

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    FeatureKind kind_;
    std::size_t alphabet_size_;
    std::size_t dimension_;
};

/// Advantage-decomposed value model:
///   V(a^t) = c + sum_k A(a^{k-1}, a_k) on proper sequences, 0 on improper ones,
/// with A = -softplus(raw) so every advantage is nonpositive by construction.
///
/// Parameter vector layout: [c, raw...]. Tabular models keep one raw value per
/// trie edge (parameter i belongs to the edge into node i); pairs off the trie
/// get the fixed drawdown -fallback. Linear models keep one weight per feature
/// after c.
class AdvantageModel {
public:
    enum class Family { Tabular, Linear };

    /// Tabular model with every edge initialized to `initial_advantage`.
    static AdvantageModel tabular(ActionAlphabet alphabet, PrefixTrie trie, double c,
                                  double initial_advantage = kDefaultInitialAdvantage,
                                  double fallback = kDefaultFallbackDrawdown);

    static AdvantageModel linear(ActionAlphabet alphabet, FeatureMap features, double c,
                                 std::vector<double> weights = {});

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] const ActionAlphabet& alphabet() const noexcept { return alphabet_; }
    [[nodiscard]] double c() const noexcept { return params_[0]; }
    void set_c(double c) { params_[0] = c; }
    [[nodiscard]] double fallback() const noexcept { return fallback_; }

    /// Tabular only.
    [[nodiscard]] const PrefixTrie& trie() const { return trie_; }
    /// Linear only.
    [[nodiscard]] const FeatureMap& feature_map() const { return features_; }

    [[nodiscard]] std::span<const double> parameters() const noexcept { return params_; }
    [[nodiscard]] std::span<double> parameters() noexcept { return params_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return params_.size(); }
    void set_parameters(std::span<const double> p);

    /// Longest path seen when the model was built; drives the planner's default horizon.
    [[nodiscard]] std::size_t max_path_length() const noexcept { return max_path_length_; }
    void set_max_path_length(std::size_t n) noexcept { max_path_length_ = n; }

    /// Position of the model while walking a sequence from the empty state.
    struct Cursor {
        PrefixTrie::NodeId node = 0;  // tabular; npos once off the trie
        TokenId last = 0;             // linear; alphabet size encodes "start"
        std::size_t depth = 0;
    };

    /// One summand of the decomposition together with its sensitivity.
    struct Step {
        double advantage = 0.0;
        double slope = 0.0;  // dA/draw
        std::array<std::size_t, 2> params{};
        std::size_t n_params = 0;  // 0 for the tabular fallback
    };

    [[nodiscard]] Cursor start() const noexcept;
    [[nodiscard]] Cursor advance(Cursor cur, TokenId a) const;
    [[nodiscard]] Step step(const Cursor& cur, TokenId a) const;

    friend bool operator==(const AdvantageModel&, const AdvantageModel&);

private:
    AdvantageModel(Family family, ActionAlphabet alphabet, PrefixTrie trie, FeatureMap features,
                   std::vector<double> params, double fallback);

    Family family_;
    ActionAlphabet alphabet_;
    PrefixTrie trie_;
    FeatureMap features_;
    std::vector<double> params_;
    double fallback_;
    std::size_t max_path_length_ = 0;
};

/// V(seq). Throws InvalidInput on unknown tokens.
[[nodiscard]] double predict_value(const AdvantageModel& model, const PathSeq& seq);

/// A(s, a) <= 0.
[[nodiscard]] double predict_advantage(const AdvantageModel& model, const PathSeq& s, TokenId a);

/// Dense dV/dparams; zero for improper sequences.
[[nodiscard]] std::vector<double> value_gradient(const AdvantageModel& model, const PathSeq& seq);

/// grad += scale * dV(seq)/dparams, touching only the affected entries.
/// Returns V(seq) computed on the same pass.
double accumulate_value_gradient(const AdvantageModel& model, const PathSeq& seq, double scale,
                                 std::span<double> grad);

/// Tabular model over the feasible-set trie whose raw values encode the exact
/// optimal advantages (zero drawdowns clamped) and whose c is J*.
[[nodiscard]] AdvantageModel clamped_oracle_model(const OptimalValues& ov);

/// Replaces every parameter: c ~ U[c_lo, c_hi], raw ~ U[raw_lo, raw_hi].
void randomize(AdvantageModel& model, Rng& rng, double c_lo, double c_hi, double raw_lo, double raw_hi);

}  // namespace tarpath
