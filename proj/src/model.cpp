#include "tarpath/model.hpp"

#include <algorithm>
#include <limits>

#include "tarpath/errors.hpp"

namespace tarpath {

double raw_from_advantage(double a) {
    if (!(a < 0.0)) return kZeroAdvantageRaw;
    return std::max(kZeroAdvantageRaw, std::log(std::expm1(-a)));
}

FeatureMap::FeatureMap(FeatureKind kind, std::size_t alphabet_size) : kind_(kind), alphabet_size_(alphabet_size) {
    const std::size_t pairs = (alphabet_size_ + 1) * alphabet_size_;
    const std::size_t buckets = kind_ == FeatureKind::DepthEdgePair ? kDepthBuckets : 1;
    dimension_ = buckets * pairs + 1;
}

std::array<std::size_t, 2> FeatureMap::active(TokenId last, std::size_t depth, TokenId a) const {
    const std::size_t pairs = (alphabet_size_ + 1) * alphabet_size_;
    std::size_t cell = static_cast<std::size_t>(last) * alphabet_size_ + a;
    if (kind_ == FeatureKind::DepthEdgePair) cell += std::min(depth, kDepthBuckets - 1) * pairs;
    return {cell, dimension_ - 1};
}

std::vector<double> FeatureMap::features(const PathSeq& s, TokenId a) const {
    std::vector<double> phi(dimension_, 0.0);
    const TokenId last = s.empty() ? static_cast<TokenId>(alphabet_size_) : s.elems.back();
    for (std::size_t i : active(last, s.size(), a)) phi[i] += 1.0;
    return phi;
}

AdvantageModel::AdvantageModel(Family family, ActionAlphabet alphabet, PrefixTrie trie, FeatureMap features,
                               std::vector<double> params, double fallback)
    : family_(family),
      alphabet_(std::move(alphabet)),
      trie_(std::move(trie)),
      features_(features),
      params_(std::move(params)),
      fallback_(fallback) {}

AdvantageModel AdvantageModel::tabular(ActionAlphabet alphabet, PrefixTrie trie, double c, double initial_advantage,
                                       double fallback) {
    if (trie.alphabet_size() != alphabet.size()) fail(ErrorKind::InvalidInput, "trie and alphabet disagree in size");
    if (!(fallback > 0.0)) fail(ErrorKind::InvalidInput, "fallback drawdown must be positive");
    std::vector<double> params(trie.size(), raw_from_advantage(initial_advantage));
    params[0] = c;
    const std::size_t depth = trie.max_depth();
    FeatureMap unused(FeatureKind::EdgePair, alphabet.size());
    AdvantageModel m(Family::Tabular, std::move(alphabet), std::move(trie), unused, std::move(params), fallback);
    m.max_path_length_ = depth;
    return m;
}

AdvantageModel AdvantageModel::linear(ActionAlphabet alphabet, FeatureMap features, double c,
                                      std::vector<double> weights) {
    if (weights.empty()) weights.assign(features.dimension(), 0.0);
    if (weights.size() != features.dimension())
        fail(ErrorKind::InvalidInput, "weight vector has " + std::to_string(weights.size()) + " entries, expected " +
                                          std::to_string(features.dimension()));
    std::vector<double> params;
    params.reserve(weights.size() + 1);
    params.push_back(c);
    params.insert(params.end(), weights.begin(), weights.end());
    PrefixTrie empty(alphabet.size());
    return AdvantageModel(Family::Linear, std::move(alphabet), std::move(empty), features, std::move(params),
                          kDefaultFallbackDrawdown);
}

void AdvantageModel::set_parameters(std::span<const double> p) {
    if (p.size() != params_.size()) fail(ErrorKind::InvalidInput, "parameter vector size mismatch");
    std::copy(p.begin(), p.end(), params_.begin());
}

AdvantageModel::Cursor AdvantageModel::start() const noexcept {
    return Cursor{trie_.root(), static_cast<TokenId>(alphabet_.size()), 0};
}

AdvantageModel::Cursor AdvantageModel::advance(Cursor cur, TokenId a) const {
    if (family_ == Family::Tabular && cur.node != PrefixTrie::npos) cur.node = trie_.child(cur.node, a);
    cur.last = a;
    ++cur.depth;
    return cur;
}

AdvantageModel::Step AdvantageModel::step(const Cursor& cur, TokenId a) const {
    Step s;
    if (family_ == Family::Tabular) {
        const auto child = cur.node == PrefixTrie::npos ? PrefixTrie::npos : trie_.child(cur.node, a);
        if (child == PrefixTrie::npos) {
            s.advantage = -fallback_;
            return s;
        }
        const auto idx = static_cast<std::size_t>(child);
        s.advantage = advantage_from_raw(params_[idx]);
        s.slope = -sigmoid(params_[idx]);
        s.params[0] = idx;
        s.n_params = 1;
        return s;
    }
    const auto act = features_.active(cur.last, cur.depth, a);
    const double z = params_[1 + act[0]] + params_[1 + act[1]];
    s.advantage = advantage_from_raw(z);
    s.slope = -sigmoid(z);
    s.params = {1 + act[0], 1 + act[1]};
    s.n_params = 2;
    return s;
}

bool operator==(const AdvantageModel& x, const AdvantageModel& y) {
    if (x.family_ != y.family_ || !(x.alphabet_ == y.alphabet_) || x.params_ != y.params_ ||
        x.fallback_ != y.fallback_ || x.max_path_length_ != y.max_path_length_)
        return false;
    if (x.family_ == AdvantageModel::Family::Linear) return x.features_ == y.features_;
    if (x.trie_.size() != y.trie_.size()) return false;
    for (std::size_t i = 0; i < x.trie_.size(); ++i) {
        const auto n = static_cast<PrefixTrie::NodeId>(i);
        if (!(x.trie_.path(n) == y.trie_.path(n))) return false;
    }
    return true;
}

double predict_value(const AdvantageModel& model, const PathSeq& seq) {
    if (!is_proper(classify(model.alphabet(), seq))) return 0.0;
    double v = model.c();
    auto cur = model.start();
    for (TokenId a : seq) {
        v += model.step(cur, a).advantage;
        cur = model.advance(cur, a);
    }
    return v;
}

double predict_advantage(const AdvantageModel& model, const PathSeq& s, TokenId a) {
    model.alphabet().check(a);
    auto cur = model.start();
    for (TokenId t : s) {
        model.alphabet().check(t);
        cur = model.advance(cur, t);
    }
    return model.step(cur, a).advantage;
}

double accumulate_value_gradient(const AdvantageModel& model, const PathSeq& seq, double scale,
                                 std::span<double> grad) {
    if (!is_proper(classify(model.alphabet(), seq))) return 0.0;
    double v = model.c();
    grad[0] += scale;
    auto cur = model.start();
    for (TokenId a : seq) {
        const auto st = model.step(cur, a);
        v += st.advantage;
        for (std::size_t i = 0; i < st.n_params; ++i) grad[st.params[i]] += scale * st.slope;
        cur = model.advance(cur, a);
    }
    return v;
}

std::vector<double> value_gradient(const AdvantageModel& model, const PathSeq& seq) {
    std::vector<double> g(model.parameter_count(), 0.0);
    (void)accumulate_value_gradient(model, seq, 1.0, g);
    return g;
}

AdvantageModel clamped_oracle_model(const OptimalValues& ov) {
    const PrefixTrie& trie = ov.trie();
    AdvantageModel model = AdvantageModel::tabular(ov.alphabet(), trie, ov.j_star());
    auto p = model.parameters();
    for (std::size_t i = 1; i < trie.size(); ++i) {
        const auto node = static_cast<PrefixTrie::NodeId>(i);
        p[i] = raw_from_advantage(ov.adv(trie.parent(node), trie.edge_token(node)));
    }
    return model;
}

void randomize(AdvantageModel& model, Rng& rng, double c_lo, double c_hi, double raw_lo, double raw_hi) {
    auto p = model.parameters();
    p[0] = rng.uniform(c_lo, c_hi);
    for (std::size_t i = 1; i < p.size(); ++i) p[i] = rng.uniform(raw_lo, raw_hi);
}

}  // namespace tarpath
