#include "tarpath/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tarpath/attribution.hpp"
#include "tarpath/errors.hpp"
#include "tarpath/io.hpp"
#include "tarpath/losses.hpp"
#include "tarpath/oracle.hpp"
#include "tarpath/planner.hpp"
#include "tarpath/train.hpp"

namespace tarpath::cli {

namespace {

using io::json;

struct GenArgs {
    std::size_t actions = 0, depth = 0, paths = 0;
    std::uint64_t seed = 0;
    double yield_min = 0.0, yield_max = 1.0, stddev = 0.1;
    std::string noise = "bernoulli", out;
};

struct SampleArgs {
    std::string instance, out, rl_out;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

struct OracleArgs {
    std::string instance, out;
};

struct TrainArgs {
    std::string instance, data, out, report, family = "tabular", features = "edge_pair", p0 = "trie", p0_file,
                                                 optimizer = "lbfgs", init = "default";
    double lambda = 100.0, tol = 1e-8, step = 0.1, max_step = 4.0;
    std::optional<double> kappa;
    std::size_t max_iters = 50000;
    std::uint64_t seed = 0;
};

struct PlanArgs {
    std::string model, instance, out;
    std::optional<std::size_t> max_len;
};

struct AttributeArgs {
    std::string model, path, out;
};

struct VerifyArgs {
    std::string instance, report;
    double lambda = 100.0, tol = 1e-9;
};

NoiseModel noise_from_name(const std::string& name, double stddev) {
    if (name == "noiseless") return NoiseModel::noiseless();
    if (name == "bernoulli") return NoiseModel::bernoulli();
    return NoiseModel::truncated_gaussian(stddev);
}

PathSeq parse_path_arg(const ActionAlphabet& ab, const std::string& text) {
    std::vector<std::string> names;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) names.push_back(tok);
    return encode(ab, names);
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
    RandomInstanceSpec spec;
    spec.alphabet_size = a.actions;
    spec.max_depth = a.depth;
    spec.path_count = a.paths;
    spec.yield_min = a.yield_min;
    spec.yield_max = a.yield_max;
    spec.noise = noise_from_name(a.noise, a.stddev);
    const PLInstance inst = random_instance(spec, a.seed);
    io::write_atomic(a.out, io::dump(io::instance_to_json(inst)));
    out << "wrote " << inst.yields().size() << " paths to " << a.out << "\n";
    return kExitOk;
}

int cmd_sample(const SampleArgs& a, std::ostream& out) {
    const PLInstance inst = io::instance_from_json(io::read_json(a.instance));
    const PathYieldDataset data = sample_dataset(inst, a.n, a.seed);
    io::write_atomic(a.out, io::dataset_to_jsonl(inst.alphabet(), data));
    if (!a.rl_out.empty()) {
        // Separate stream for the action draws so the path-yield file does not depend on --rl-out.
        const RLDataset rl = build_offline_dataset(inst, data, a.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
        io::write_atomic(a.rl_out, io::rl_dataset_to_jsonl(inst.alphabet(), rl));
    }
    out << "wrote " << data.pairs.size() << " pairs to " << a.out << "\n";
    return kExitOk;
}

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
    const PLInstance inst = io::instance_from_json(io::read_json(a.instance));
    const OptimalValues ov = compute_optimal(inst);
    io::write_atomic(a.out, io::dump(io::oracle_to_json(ov)));
    out << "J* = " << ov.j_star() << " over " << ov.trie().size() << " trie states\n";
    return kExitOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const PLInstance inst = io::instance_from_json(io::read_json(a.instance));
    const ActionAlphabet& ab = inst.alphabet();
    const PathYieldDataset data = io::dataset_from_jsonl(ab, io::read_text(a.data), a.seed);
    if (data.pairs.empty()) fail(ErrorKind::InvalidInput, "training data is empty");

    std::vector<PathSeq> observed;
    for (const auto& p : data.pairs) observed.push_back(p.path);
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
    const PrefixTrie trie = PrefixTrie::build(ab, observed);

    TrainConfig cfg;
    cfg.lambda = a.lambda;
    cfg.kappa = a.kappa.value_or(10.0 * a.lambda);
    cfg.step_size = a.step;
    cfg.max_step = a.max_step;
    cfg.max_iterations = a.max_iters;
    cfg.grad_tol = a.tol;
    cfg.seed = a.seed;
    cfg.optimizer = a.optimizer == "gd" ? Optimizer::GradientDescent : Optimizer::LBFGS;
    if (!(cfg.lambda > 0.0) || !(cfg.kappa >= 0.0)) fail(ErrorKind::InvalidInput, "need lambda > 0 and kappa >= 0");

    constexpr double kInitialC = 0.5;
    AdvantageModel model =
        a.family == "tabular"
            ? AdvantageModel::tabular(ab, trie, kInitialC)
            : AdvantageModel::linear(ab,
                                     FeatureMap(a.features == "edge_pair" ? FeatureKind::EdgePair
                                                                          : FeatureKind::DepthEdgePair,
                                                ab.size()),
                                     kInitialC);
    model.set_max_path_length(trie.max_depth());
    if (a.init == "random") {
        Rng rng(a.seed);
        randomize(model, rng, 0.0, 1.0, -3.0, 1.0);
    }

    StateWeighting p0 = a.p0 == "file" ? io::state_weighting_from_json(ab, io::read_json(a.p0_file))
                                       : StateWeighting::uniform_over_trie(trie);
    const TrainResult result =
        train(std::move(model), tar_objective(std::move(p0), RegressionTargets::empirical(ab, data), cfg.lambda, cfg.kappa),
              cfg);
    io::write_atomic(a.out, io::dump(io::model_to_json(result.model)));
    if (!a.report.empty()) io::write_atomic(a.report, io::dump(io::train_report_to_json(result, cfg)));
    out << "final loss " << result.trace.back() << " after " << result.iterations << " iterations ("
        << result.stop_reason << ")\n";
    return kExitOk;
}

int cmd_plan(const PlanArgs& a, std::ostream& out) {
    const AdvantageModel model = io::model_from_json(io::read_json(a.model));
    PlanResult plan = greedy_path(model, a.max_len.value_or(default_max_len(model)));
    if (!a.instance.empty()) {
        const PLInstance inst = io::instance_from_json(io::read_json(a.instance));
        if (!(inst.alphabet() == model.alphabet())) fail(ErrorKind::InvalidInput, "model and instance alphabets differ");
        plan = evaluate_plan(std::move(plan), inst, compute_optimal(inst));
    }
    io::write_atomic(a.out, io::dump(io::plan_to_json(model.alphabet(), plan)));
    out << format(model.alphabet(), plan.path) << " predicted " << plan.predicted_value << "\n";
    return kExitOk;
}

int cmd_attribute(const AttributeArgs& a, std::ostream& out) {
    const AdvantageModel model = io::model_from_json(io::read_json(a.model));
    const AttributionReport report = attribute(model, parse_path_arg(model.alphabet(), a.path));
    io::write_atomic(a.out, io::dump(io::attribution_to_json(model.alphabet(), report)));
    out << format(model.alphabet(), report.path) << " total " << report.total << "\n";
    return kExitOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    const PLInstance inst = io::instance_from_json(io::read_json(a.instance));
    const ActionAlphabet& ab = inst.alphabet();
    const OptimalValues ov = compute_optimal(inst);
    const PrefixTrie& trie = ov.trie();
    const StateWeighting p0 = StateWeighting::uniform_over_trie(trie);
    const PenaltyMix mix = PenaltyMix::fringe(inst);

    // Deterministic probe models around the oracle.
    std::vector<std::pair<std::string, AdvantageModel>> probes;
    const AdvantageModel exact = clamped_oracle_model(ov);
    probes.emplace_back("clamped_oracle", exact);
    for (double shift : {0.1, -0.1}) {
        AdvantageModel m = exact;
        m.set_c(m.c() + shift);
        probes.emplace_back(shift > 0 ? "oracle_c_plus_0.1" : "oracle_c_minus_0.1", std::move(m));
    }
    {
        AdvantageModel m = exact;
        auto p = m.parameters();
        for (std::size_t i = 1; i < p.size(); ++i) p[i] = std::max(p[i], -3.0) + 0.5;
        probes.emplace_back("oracle_raw_shifted", std::move(m));
    }
    probes.emplace_back("linear_zero", AdvantageModel::linear(ab, FeatureMap(FeatureKind::EdgePair, ab.size()), ov.j_star()));

    json gaps = json::array();
    double max_gap = 0.0;
    for (const auto& [name, m] : probes) {
        const LossIdentityGap g = loss_identity_gap(m, inst, p0, mix, a.lambda);
        max_gap = std::max(max_gap, g.gap);
        gaps.push_back({{"model", name},
                        {"lhs", g.lhs},
                        {"rhs", g.rhs},
                        {"vlp", g.vlp},
                        {"sigma2_term", g.sigma2_term},
                        {"hinge_excess_term", g.hinge_excess_term},
                        {"gap", g.gap}});
    }

    // Decomposition residuals on every trie state, its one-step fringe, and
    // improper extensions past each complete state.
    double max_residual = 0.0;
    std::size_t checked = 0;
    double max_bellman = 0.0;
    const auto vstar = [&](const PathSeq& s) { return ov.value(s); };
    for (std::size_t i = 0; i < trie.size(); ++i) {
        const PathSeq& s = trie.path(static_cast<PrefixTrie::NodeId>(i));
        max_residual = std::max(max_residual, std::abs(check_decomposition(ov, s)));
        ++checked;
        for (TokenId t = 0; t < ab.size(); ++t) {
            const PathSeq next = append(ab, s, t);
            max_residual = std::max(max_residual, std::abs(check_decomposition(ov, next)));
            max_residual = std::max(max_residual, std::abs(check_decomposition(ov, append(ab, next, 0))));
            checked += 2;
            max_bellman = std::max(max_bellman, transition_operator(vstar, inst, s, t) - ov.value(s));
        }
    }

    constexpr double kResidualTol = 1e-12;
    const bool pass = max_gap <= a.tol && max_residual <= kResidualTol && max_bellman <= 0.0;
    const json report{{"lambda", a.lambda},
                      {"sigma2", noise_variance(inst)},
                      {"j_star", ov.j_star()},
                      {"identity", std::move(gaps)},
                      {"identity_max_gap", max_gap},
                      {"identity_tolerance", a.tol},
                      {"decomposition_checked", checked},
                      {"decomposition_max_residual", max_residual},
                      {"bellman_max_violation", max_bellman},
                      {"pass", pass}};
    io::write_atomic(a.report, io::dump(report));
    out << (pass ? "PASS" : "FAIL") << " max gap " << max_gap << ", max residual " << max_residual << "\n";
    return pass ? kExitOk : kExitDomainError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trajectory advantage regression for offline path learning", "tarpath"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a random path-learning instance");
    g->add_option("--actions", gen.actions, "Alphabet size including END")->required()->check(CLI::Range(2, 27));
    g->add_option("--depth", gen.depth, "Maximum number of non-terminal steps")->required();
    g->add_option("--paths", gen.paths, "Number of feasible paths")->required();
    g->add_option("--seed", gen.seed)->required();
    g->add_option("--out", gen.out)->required();
    g->add_option("--yield-min", gen.yield_min)->capture_default_str();
    g->add_option("--yield-max", gen.yield_max)->capture_default_str();
    g->add_option("--noise", gen.noise)
        ->check(CLI::IsMember({"noiseless", "bernoulli", "truncated_gaussian"}))
        ->capture_default_str();
    g->add_option("--stddev", gen.stddev, "Truncated Gaussian noise scale")->capture_default_str();

    SampleArgs sample;
    auto* s = app.add_subcommand("sample", "Sample path-yield pairs from an instance");
    s->add_option("--instance", sample.instance)->required();
    s->add_option("--n", sample.n)->required();
    s->add_option("--seed", sample.seed)->required();
    s->add_option("--out", sample.out)->required();
    s->add_option("--rl-out", sample.rl_out, "Also write the reduced offline RL transitions");

    OracleArgs oracle;
    auto* o = app.add_subcommand("oracle", "Dump exact optimal values of an instance");
    o->add_option("--instance", oracle.instance)->required();
    o->add_option("--out", oracle.out)->required();

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Fit an advantage model to path-yield data");
    t->add_option("--instance", tr.instance, "Instance file (alphabet only)")->required();
    t->add_option("--data", tr.data, "Path-yield JSON Lines")->required();
    t->add_option("--out", tr.out)->required();
    t->add_option("--report", tr.report);
    t->add_option("--seed", tr.seed)->required();
    t->add_option("--lambda", tr.lambda)->capture_default_str();
    t->add_option("--kappa", tr.kappa, "Nonnegativity hinge weight (default 10*lambda)");
    t->add_option("--family", tr.family)->check(CLI::IsMember({"tabular", "linear"}))->capture_default_str();
    t->add_option("--features", tr.features)
        ->check(CLI::IsMember({"edge_pair", "depth_edge_pair"}))
        ->capture_default_str();
    auto* p0_opt = t->add_option("--p0", tr.p0)->check(CLI::IsMember({"trie", "file"}))->capture_default_str();
    t->add_option("--p0-file", tr.p0_file)->needs(p0_opt);
    t->add_option("--max-iters", tr.max_iters)->capture_default_str();
    t->add_option("--tol", tr.tol)->capture_default_str();
    t->add_option("--step", tr.step)->capture_default_str();
    t->add_option("--max-step", tr.max_step, "Cap on the max-norm of one parameter update")->capture_default_str();
    t->add_option("--optimizer", tr.optimizer)->check(CLI::IsMember({"lbfgs", "gd"}))->capture_default_str();
    t->add_option("--init", tr.init)->check(CLI::IsMember({"default", "random"}))->capture_default_str();

    PlanArgs plan;
    auto* p = app.add_subcommand("plan", "Extract the greedy path of a trained model");
    p->add_option("--model", plan.model)->required();
    p->add_option("--out", plan.out)->required();
    p->add_option("--instance", plan.instance, "Score the plan against this instance");
    p->add_option("--max-len", plan.max_len)->check(CLI::PositiveNumber);

    AttributeArgs attr;
    auto* at = app.add_subcommand("attribute", "Split a path's predicted yield into per-action drawdowns");
    at->add_option("--model", attr.model)->required();
    at->add_option("--path", attr.path, "Comma-separated tokens, e.g. a,b,END")->required();
    at->add_option("--out", attr.out)->required();

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "Check the loss identity, decomposition and Bellman feasibility");
    v->add_option("--instance", ver.instance)->required();
    v->add_option("--report", ver.report)->required();
    v->add_option("--lambda", ver.lambda)->capture_default_str();
    v->add_option("--tol", ver.tol)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    if (tr.p0 == "file" && tr.p0_file.empty()) {
        err << "error: --p0 file requires --p0-file\n";
        return kExitUsage;
    }

    try {
        if (g->parsed()) return cmd_gen(gen, out);
        if (s->parsed()) return cmd_sample(sample, out);
        if (o->parsed()) return cmd_oracle(oracle, out);
        if (t->parsed()) return cmd_train(tr, out);
        if (p->parsed()) return cmd_plan(plan, out);
        if (at->parsed()) return cmd_attribute(attr, out);
        if (v->parsed()) return cmd_verify(ver, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitUsage;
}

}  // namespace tarpath::cli
