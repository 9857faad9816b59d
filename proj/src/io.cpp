#include "tarpath/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tarpath/errors.hpp"

namespace tarpath::io {

namespace {

void dump_value(const json& j, int indent, int level, std::string& out) {
    const auto newline = [&](int lvl) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * lvl), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(level + 1);
                out += json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump_value(it.value(), indent, level + 1, out);
            }
            newline(level);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat && indent >= 0 ? ", " : ",";
                first = false;
                if (!flat) newline(level + 1);
                dump_value(e, indent, level + 1, out);
            }
            if (!flat) newline(level);
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::InvalidInput, std::string("missing field '") + key + "'");
    return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
    try {
        return field(j, key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidInput, std::string("field '") + key + "': " + e.what());
    }
}

json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidInput, where + ": " + e.what());
    }
}

template <class F>
void for_each_line(const std::string& text, F&& f) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        f(parse_json(line, "line " + std::to_string(lineno)));
    }
}

const char* feature_kind_name(FeatureKind k) { return k == FeatureKind::EdgePair ? "edge_pair" : "depth_edge_pair"; }

FeatureKind feature_kind_from_name(const std::string& s) {
    if (s == "edge_pair") return FeatureKind::EdgePair;
    if (s == "depth_edge_pair") return FeatureKind::DepthEdgePair;
    fail(ErrorKind::InvalidInput, "unknown feature kind '" + s + "'");
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get<double>(j, key);
}

}  // namespace

std::string dump(const json& j, int indent) {
    std::string out;
    dump_value(j, indent, 0, out);
    if (indent >= 0) out += '\n';
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::InvalidInput, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) fail(ErrorKind::InvalidInput, "failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::filesystem::path& path) { return parse_json(read_text(path), path.string()); }

json alphabet_to_json(const ActionAlphabet& alphabet) {
    return json{{"tokens", alphabet.tokens()}, {"terminal", alphabet.terminal_name()}};
}

ActionAlphabet alphabet_from_json(const json& j) {
    return ActionAlphabet(get<std::vector<std::string>>(j, "tokens"), get<std::string>(j, "terminal"));
}

json path_to_json(const ActionAlphabet& alphabet, const PathSeq& path) { return decode(alphabet, path); }

PathSeq path_from_json(const ActionAlphabet& alphabet, const json& j) {
    if (!j.is_array()) fail(ErrorKind::InvalidInput, "path must be an array of token names");
    std::vector<std::string> names;
    for (const auto& e : j) {
        if (!e.is_string()) fail(ErrorKind::InvalidInput, "path elements must be strings");
        names.push_back(e.get<std::string>());
    }
    return encode(alphabet, names);
}

json instance_to_json(const PLInstance& instance) {
    const ActionAlphabet& ab = instance.alphabet();
    json paths = json::array();
    for (const auto& [path, y] : instance.yields())
        paths.push_back({{"path", path_to_json(ab, path)}, {"yield", y}, {"weight", instance.weight(path)}});
    json noise;
    switch (instance.noise().kind) {
        case NoiseModel::Kind::Noiseless:
            noise = {{"kind", "noiseless"}};
            break;
        case NoiseModel::Kind::Bernoulli:
            noise = {{"kind", "bernoulli"}};
            break;
        case NoiseModel::Kind::TruncatedGaussian:
            noise = {{"kind", "truncated_gaussian"}, {"stddev", instance.noise().stddev}};
            break;
    }
    return json{{"alphabet", alphabet_to_json(ab)}, {"paths", std::move(paths)}, {"noise", std::move(noise)}};
}

PLInstance instance_from_json(const json& j) {
    ActionAlphabet ab = alphabet_from_json(field(j, "alphabet"));
    std::map<PathSeq, double> yields, weights;
    bool any_weight = false;
    for (const auto& e : field(j, "paths")) {
        PathSeq p = path_from_json(ab, field(e, "path"));
        if (yields.contains(p)) fail(ErrorKind::InvalidInstance, "duplicate path " + format(ab, p));
        yields.emplace(p, get<double>(e, "yield"));
        if (e.contains("weight")) {
            weights.emplace(p, get<double>(e, "weight"));
            any_weight = true;
        }
    }
    if (any_weight && weights.size() != yields.size())
        fail(ErrorKind::InvalidInstance, "either every path or no path carries a weight");

    NoiseModel noise = NoiseModel::bernoulli();
    if (j.contains("noise")) {
        const std::string kind = get<std::string>(j.at("noise"), "kind");
        if (kind == "noiseless")
            noise = NoiseModel::noiseless();
        else if (kind == "bernoulli")
            noise = NoiseModel::bernoulli();
        else if (kind == "truncated_gaussian")
            noise = NoiseModel::truncated_gaussian(get<double>(j.at("noise"), "stddev"));
        else
            fail(ErrorKind::InvalidInstance, "unknown noise kind '" + kind + "'");
    }
    return PLInstance(std::move(ab), std::move(yields), std::move(weights), noise);
}

std::string dataset_to_jsonl(const ActionAlphabet& alphabet, const PathYieldDataset& data) {
    std::string out;
    for (const auto& [path, y] : data.pairs) out += dump(json{{"path", path_to_json(alphabet, path)}, {"y", y}}, -1) + "\n";
    return out;
}

PathYieldDataset dataset_from_jsonl(const ActionAlphabet& alphabet, const std::string& text, std::uint64_t seed) {
    PathYieldDataset data;
    data.seed = seed;
    for_each_line(text, [&](const json& j) {
        const double y = get<double>(j, "y");
        if (!(y >= 0.0 && y <= 1.0)) fail(ErrorKind::InvalidInput, "observed yield outside [0,1]");
        PathSeq p = path_from_json(alphabet, field(j, "path"));
        if (classify(alphabet, p) != SeqClass::Complete)
            fail(ErrorKind::InvalidInput, "dataset path " + format(alphabet, p) + " is not complete");
        data.pairs.push_back({std::move(p), y});
    });
    return data;
}

std::string rl_dataset_to_jsonl(const ActionAlphabet& alphabet, const RLDataset& data) {
    std::string out;
    for (const auto& t : data.transitions)
        out += dump(json{{"s", path_to_json(alphabet, t.s)},
                         {"a", alphabet.name(t.a)},
                         {"r", t.r},
                         {"s_next", path_to_json(alphabet, t.s_next)}},
                    -1) +
               "\n";
    return out;
}

RLDataset rl_dataset_from_jsonl(const ActionAlphabet& alphabet, const std::string& text, std::uint64_t seed) {
    RLDataset data;
    data.seed = seed;
    for_each_line(text, [&](const json& j) {
        RLTransition t{path_from_json(alphabet, field(j, "s")), alphabet.id(get<std::string>(j, "a")),
                       get<double>(j, "r"), path_from_json(alphabet, field(j, "s_next"))};
        if (!(t.s_next == append(alphabet, t.s, t.a))) fail(ErrorKind::InvalidInput, "transition with s_next != s + a");
        data.transitions.push_back(std::move(t));
    });
    return data;
}

json oracle_to_json(const OptimalValues& ov) {
    const ActionAlphabet& ab = ov.alphabet();
    const PrefixTrie& trie = ov.trie();
    json nodes = json::array();
    for (std::size_t i = 0; i < trie.size(); ++i) {
        const auto n = static_cast<PrefixTrie::NodeId>(i);
        json q = json::object(), adv = json::object();
        for (TokenId a = 0; a < ab.size(); ++a) {
            q[ab.name(a)] = ov.q(n, a);
            adv[ab.name(a)] = ov.adv(n, a);
        }
        nodes.push_back({{"state", path_to_json(ab, trie.path(n))}, {"v", ov.v(n)}, {"q", q}, {"adv", adv}});
    }
    return json{{"alphabet", alphabet_to_json(ab)}, {"nodes", std::move(nodes)}, {"j_star", ov.j_star()}};
}

json model_to_json(const AdvantageModel& model) {
    const ActionAlphabet& ab = model.alphabet();
    const auto p = model.parameters();
    json raw;
    if (model.family() == AdvantageModel::Family::Tabular) {
        json edges = json::array();
        const PrefixTrie& trie = model.trie();
        for (std::size_t i = 1; i < trie.size(); ++i)
            edges.push_back({{"path", path_to_json(ab, trie.path(static_cast<PrefixTrie::NodeId>(i)))}, {"z", p[i]}});
        raw = {{"edges", std::move(edges)}};
    } else {
        raw = {{"feature_kind", feature_kind_name(model.feature_map().kind())},
               {"weights", std::vector<double>(p.begin() + 1, p.end())}};
    }
    return json{{"c", model.c()},
                {"family", model.family() == AdvantageModel::Family::Tabular ? "tabular" : "linear"},
                {"raw", std::move(raw)},
                {"alphabet", alphabet_to_json(ab)},
                {"fallback_B", model.fallback()},
                {"max_path_length", model.max_path_length()}};
}

AdvantageModel model_from_json(const json& j) {
    ActionAlphabet ab = alphabet_from_json(field(j, "alphabet"));
    const std::string family = get<std::string>(j, "family");
    const double c = get<double>(j, "c");
    const json& raw = field(j, "raw");
    if (family == "tabular") {
        PrefixTrie trie(ab.size());
        std::vector<double> z;
        for (const auto& e : field(raw, "edges")) {
            const PathSeq p = path_from_json(ab, field(e, "path"));
            if (p.empty() || trie.find(p.prefix(p.size() - 1)) == PrefixTrie::npos || trie.find(p) != PrefixTrie::npos)
                fail(ErrorKind::InvalidInput, "tabular edges must list each child after its parent exactly once");
            (void)trie.insert(p);
            z.push_back(get<double>(e, "z"));
        }
        AdvantageModel m = AdvantageModel::tabular(ab, std::move(trie), c, kDefaultInitialAdvantage,
                                                   j.contains("fallback_B") ? get<double>(j, "fallback_B")
                                                                            : kDefaultFallbackDrawdown);
        std::vector<double> params{c};
        params.insert(params.end(), z.begin(), z.end());
        m.set_parameters(params);
        if (j.contains("max_path_length")) m.set_max_path_length(get<std::size_t>(j, "max_path_length"));
        return m;
    }
    if (family == "linear") {
        FeatureMap fm(feature_kind_from_name(get<std::string>(raw, "feature_kind")), ab.size());
        AdvantageModel m = AdvantageModel::linear(ab, fm, c, get<std::vector<double>>(raw, "weights"));
        if (j.contains("max_path_length")) m.set_max_path_length(get<std::size_t>(j, "max_path_length"));
        return m;
    }
    fail(ErrorKind::InvalidInput, "unknown model family '" + family + "'");
}

json state_weighting_to_json(const ActionAlphabet& alphabet, const StateWeighting& p0) {
    json states = json::array();
    for (const auto& s : p0.states) states.push_back(path_to_json(alphabet, s));
    return json{{"states", std::move(states)}, {"weights", p0.weights}};
}

StateWeighting state_weighting_from_json(const ActionAlphabet& alphabet, const json& j) {
    StateWeighting p0;
    for (const auto& s : field(j, "states")) p0.states.push_back(path_from_json(alphabet, s));
    p0.weights = get<std::vector<double>>(j, "weights");
    p0.validate(alphabet);
    return p0;
}

json plan_to_json(const ActionAlphabet& alphabet, const PlanResult& plan) {
    return json{{"path", path_to_json(alphabet, plan.path)},
                {"predicted", plan.predicted_value},
                {"true_yield", optional_number(plan.true_yield)},
                {"regret", optional_number(plan.regret)},
                {"truncated", plan.truncated}};
}

PlanResult plan_from_json(const ActionAlphabet& alphabet, const json& j) {
    PlanResult p;
    p.path = path_from_json(alphabet, field(j, "path"));
    p.predicted_value = get<double>(j, "predicted");
    p.true_yield = optional_from(j, "true_yield");
    p.regret = optional_from(j, "regret");
    p.truncated = get<bool>(j, "truncated");
    return p;
}

json attribution_to_json(const ActionAlphabet& alphabet, const AttributionReport& report) {
    json steps = json::array();
    for (const auto& s : report.steps)
        steps.push_back(
            {{"prefix", path_to_json(alphabet, s.prefix)}, {"action", alphabet.name(s.action)}, {"drawdown", s.drawdown}});
    return json{{"path", path_to_json(alphabet, report.path)},
                {"base", report.base},
                {"steps", std::move(steps)},
                {"total", report.total},
                {"improper", report.improper}};
}

AttributionReport attribution_from_json(const ActionAlphabet& alphabet, const json& j) {
    AttributionReport r;
    r.path = path_from_json(alphabet, field(j, "path"));
    r.base = get<double>(j, "base");
    for (const auto& s : field(j, "steps"))
        r.steps.push_back({path_from_json(alphabet, field(s, "prefix")), alphabet.id(get<std::string>(s, "action")),
                           get<double>(s, "drawdown")});
    r.total = get<double>(j, "total");
    r.improper = j.contains("improper") && get<bool>(j, "improper");
    return r;
}

json train_report_to_json(const TrainResult& result, const TrainConfig& config) {
    return json{{"final_loss", result.trace.back()},
                {"initial_loss", result.trace.front()},
                {"iterations", result.iterations},
                {"grad_norm", result.grad_norm},
                {"converged", result.converged},
                {"stop_reason", result.stop_reason},
                {"lambda", config.lambda},
                {"kappa", config.kappa},
                {"step_size", config.step_size},
                {"max_step", config.max_step},
                {"optimizer", config.optimizer == Optimizer::LBFGS ? "lbfgs" : "gd"},
                {"seed", config.seed}};
}

}  // namespace tarpath::io
