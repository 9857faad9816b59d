#include "tarpath/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tarpath/errors.hpp"

namespace tarpath {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

// Number of complete sequences with at most `depth` non-terminal steps, saturated.
std::uint64_t count_complete(std::size_t nonterminals, std::size_t depth) {
    constexpr std::uint64_t cap = std::uint64_t{1} << 62;
    std::uint64_t total = 0;
    std::uint64_t level = 1;
    for (std::size_t len = 0; len <= depth; ++len) {
        total = std::min(cap, total + level);
        level = (level > cap / std::max<std::size_t>(nonterminals, 1)) ? cap : level * nonterminals;
    }
    return total;
}

void enumerate_complete(const ActionAlphabet& alphabet, std::size_t depth, PathSeq& cur, std::vector<PathSeq>& out) {
    out.push_back(append(alphabet, cur, alphabet.terminal()));
    if (cur.size() == depth) return;
    for (TokenId t = 0; t < alphabet.size(); ++t) {
        if (alphabet.is_terminal(t)) continue;
        cur.elems.push_back(t);
        enumerate_complete(alphabet, depth, cur, out);
        cur.elems.pop_back();
    }
}

}  // namespace

NoiseModel NoiseModel::truncated_gaussian(double stddev) {
    if (!(stddev > 0.0) || !std::isfinite(stddev))
        fail(ErrorKind::InvalidInstance, "truncated Gaussian stddev must be positive");
    return {Kind::TruncatedGaussian, stddev};
}

PLInstance::PLInstance(ActionAlphabet alphabet, std::map<PathSeq, double> yields,
                       std::map<PathSeq, double> weights, NoiseModel noise)
    : alphabet_(std::move(alphabet)), yields_(std::move(yields)), weights_(std::move(weights)), noise_(noise) {
    for (const auto& [path, y] : yields_) {
        SeqClass cls;
        try {
            cls = classify(alphabet_, path);
        } catch (const Error& e) {
            fail(ErrorKind::InvalidInstance, e.what());
        }
        if (cls != SeqClass::Complete)
            fail(ErrorKind::InvalidInstance, "feasible path " + format(alphabet_, path) + " is not complete");
        if (!(y >= 0.0 && y <= 1.0))
            fail(ErrorKind::InvalidInstance, "yield of " + format(alphabet_, path) + " outside [0,1]");
    }
    if (noise_.kind == NoiseModel::Kind::TruncatedGaussian && !(noise_.stddev > 0.0))
        fail(ErrorKind::InvalidInstance, "truncated Gaussian stddev must be positive");

    if (weights_.empty() && !yields_.empty()) {
        const double w = 1.0 / static_cast<double>(yields_.size());
        for (const auto& [path, y] : yields_) weights_.emplace(path, w);
    }
    if (yields_.empty()) return;

    double total = 0.0;
    for (const auto& [path, w] : weights_) {
        if (!yields_.contains(path))
            fail(ErrorKind::InvalidInstance, "logging weight on infeasible path " + format(alphabet_, path));
        if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::InvalidInstance, "negative or non-finite path weight");
        total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance)
        fail(ErrorKind::InvalidInstance, "path weights sum to " + std::to_string(total) + ", expected 1");
}

std::vector<PathSeq> PLInstance::feasible_paths() const {
    std::vector<PathSeq> out;
    out.reserve(yields_.size());
    for (const auto& [path, y] : yields_) out.push_back(path);
    return out;
}

double PLInstance::yield(const PathSeq& seq) const {
    auto it = yields_.find(seq);
    return it == yields_.end() ? 0.0 : it->second;
}

double PLInstance::weight(const PathSeq& seq) const {
    auto it = weights_.find(seq);
    return it == weights_.end() ? 0.0 : it->second;
}

bool PLInstance::full_support() const {
    return std::all_of(yields_.begin(), yields_.end(), [&](const auto& kv) { return weight(kv.first) > 0.0; });
}

std::size_t PLInstance::max_path_length() const {
    std::size_t m = 0;
    for (const auto& [path, y] : yields_) m = std::max(m, path.size());
    return m;
}

double yield_of(const PLInstance& instance, const PathSeq& seq) {
    (void)classify(instance.alphabet(), seq);
    return instance.yield(seq);
}

double sample_yield(const PLInstance& instance, const PathSeq& path, Rng& rng) {
    auto it = instance.yields().find(path);
    if (it == instance.yields().end()) return 0.0;
    const double mean = it->second;
    const NoiseModel& noise = instance.noise();
    switch (noise.kind) {
        case NoiseModel::Kind::Noiseless:
            return mean;
        case NoiseModel::Kind::Bernoulli:
            return rng.bernoulli(mean) ? 1.0 : 0.0;
        case NoiseModel::Kind::TruncatedGaussian:
            for (;;) {
                const double y = mean + noise.stddev * rng.normal();
                if (y >= 0.0 && y <= 1.0) return y;
            }
    }
    return mean;
}

const PathSeq& sample_path(const PLInstance& instance, Rng& rng) {
    const auto& weights = instance.weights();
    if (weights.empty()) fail(ErrorKind::InvalidInstance, "cannot sample from an empty feasible set");
    const double u = rng.uniform();
    double acc = 0.0;
    const PathSeq* last_positive = nullptr;
    for (const auto& [path, w] : weights) {
        if (w <= 0.0) continue;
        acc += w;
        last_positive = &path;
        if (u < acc) return path;
    }
    // Rounding left the cumulative sum a hair under 1.
    return *last_positive;
}

PathYieldDataset sample_dataset(const PLInstance& instance, std::size_t n, std::uint64_t seed) {
    if (instance.yields().empty()) fail(ErrorKind::InvalidInstance, "cannot sample from an empty feasible set");
    PathYieldDataset data;
    data.seed = seed;
    data.pairs.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const PathSeq& path = sample_path(instance, rng);
        const double y = sample_yield(instance, path, rng);
        data.pairs.push_back({path, y});
    }
    return data;
}

double conditional_variance(const PLInstance& instance, const PathSeq& path) {
    const double j = instance.yield(path);
    switch (instance.noise().kind) {
        case NoiseModel::Kind::Noiseless:
            return 0.0;
        case NoiseModel::Kind::Bernoulli:
            return j * (1.0 - j);
        case NoiseModel::Kind::TruncatedGaussian:
            break;
    }
    fail(ErrorKind::Unsupported, "truncated Gaussian noise has no analytic variance; estimate it from samples");
}

double noise_variance(const PLInstance& instance) {
    double sigma2 = 0.0;
    for (const auto& [path, w] : instance.weights()) sigma2 += w * conditional_variance(instance, path);
    return sigma2;
}

PLInstance random_instance(const RandomInstanceSpec& spec, std::uint64_t seed) {
    if (spec.alphabet_size < 2) fail(ErrorKind::Generator, "alphabet size must be at least 2");
    if (spec.path_count < 1) fail(ErrorKind::Generator, "path count must be at least 1");
    if (spec.max_depth < 1) fail(ErrorKind::Generator, "max depth must be at least 1");
    if (!(0.0 <= spec.yield_min && spec.yield_min <= spec.yield_max && spec.yield_max <= 1.0))
        fail(ErrorKind::Generator, "yield range must satisfy 0 <= min <= max <= 1");

    const ActionAlphabet alphabet = ActionAlphabet::letters(spec.alphabet_size);
    const std::size_t nonterminals = spec.alphabet_size - 1;
    const std::uint64_t possible = count_complete(nonterminals, spec.max_depth);
    if (spec.path_count > possible)
        fail(ErrorKind::Generator, "requested " + std::to_string(spec.path_count) + " paths but only " +
                                       std::to_string(possible) + " complete sequences exist");

    Rng rng(seed);
    std::set<PathSeq> chosen;
    if (possible <= 4 * static_cast<std::uint64_t>(spec.path_count)) {
        // Dense regime: enumerate everything and take a random subset.
        std::vector<PathSeq> all;
        PathSeq cur;
        enumerate_complete(alphabet, spec.max_depth, cur, all);
        for (std::size_t i = 0; i < spec.path_count; ++i) {
            const auto j = i + rng.index(all.size() - i);
            std::swap(all[i], all[j]);
            chosen.insert(all[i]);
        }
    } else {
        while (chosen.size() < spec.path_count) {
            const std::size_t len = rng.index(spec.max_depth + 1);
            PathSeq p;
            for (std::size_t k = 0; k < len; ++k) p.elems.push_back(static_cast<TokenId>(rng.index(nonterminals)));
            p.elems.push_back(alphabet.terminal());
            chosen.insert(std::move(p));
        }
    }

    std::map<PathSeq, double> yields;
    for (const auto& p : chosen) yields.emplace(p, rng.uniform(spec.yield_min, spec.yield_max));
    return PLInstance(alphabet, std::move(yields), {}, spec.noise);
}

PLInstance fixture_e1(NoiseModel noise) {
    const ActionAlphabet ab = ActionAlphabet::letters(3);
    const TokenId a = 0, b = 1, end = ab.terminal();
    return PLInstance(ab, {{PathSeq{a, end}, 0.8}, {PathSeq{b, end}, 0.3}}, {}, noise);
}

PLInstance fixture_e2(NoiseModel noise) {
    const ActionAlphabet ab = ActionAlphabet::letters(3);
    const TokenId a = 0, b = 1, end = ab.terminal();
    return PLInstance(ab, {{PathSeq{a, a, end}, 0.9}, {PathSeq{a, b, end}, 0.2}, {PathSeq{b, end}, 0.5}}, {}, noise);
}

}  // namespace tarpath
