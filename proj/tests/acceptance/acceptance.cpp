// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "support/enumeration_oracle.hpp"
#include "support/finite_difference.hpp"
#include "support/generators.hpp"
#include "tarpath/attribution.hpp"
#include "tarpath/cli.hpp"
#include "tarpath/io.hpp"
#include "tarpath/losses.hpp"
#include "tarpath/oracle.hpp"
#include "tarpath/planner.hpp"
#include "tarpath/train.hpp"

using namespace tarpath;
namespace fs = std::filesystem;

namespace {

constexpr int kInstances = 200;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d %s: %s (%.2fs)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

class Timer {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

PLInstance instance_for(int i, NoiseModel noise = NoiseModel::bernoulli()) {
    return testing::small_instance(static_cast<std::uint64_t>(i) + 1000, noise);
}

void criterion1() {
    Timer t;
    double worst = 0.0;
    std::size_t checked = 0;
    Rng rng(101);
    for (int i = 0; i < kInstances; ++i) {
        const auto inst = instance_for(i);
        const auto ov = compute_optimal(inst);
        for (std::size_t n = 0; n < ov.trie().size(); ++n) {
            worst = std::max(worst, std::abs(check_decomposition(ov, ov.trie().path(static_cast<PrefixTrie::NodeId>(n)))));
            ++checked;
        }
        for (int k = 0; k < 1000; ++k) {
            worst = std::max(worst, std::abs(check_decomposition(ov, testing::random_improper(inst.alphabet(), rng))));
            ++checked;
        }
    }
    report(1, "advantage decomposition", worst <= 1e-12,
           "max residual " + fmt("%.3g", worst) + " over " + std::to_string(checked) + " sequences", t.seconds());
}

void criterion2() {
    Timer t;
    std::size_t mismatches = 0, checked = 0;
    for (int i = 0; i < kInstances; ++i) {
        const auto inst = instance_for(i);
        const auto ov = compute_optimal(inst);
        const auto& ab = inst.alphabet();
        for (std::size_t n = 0; n < ov.trie().size(); ++n) {
            const PathSeq s = ov.trie().path(static_cast<PrefixTrie::NodeId>(n));
            ++checked;
            if (ov.value(s) != testing::best_completion(inst, s)) ++mismatches;
            if (inst.feasible(s)) continue;
            for (TokenId a = 0; a < ab.size(); ++a) {
                ++checked;
                if (ov.advantage(s, a) != testing::enumerated_advantage(inst, s, a)) ++mismatches;
                const PathSeq next = append(ab, s, a);
                ++checked;
                if (ov.value(next) != testing::best_completion(inst, next)) ++mismatches;
            }
        }
        if (ov.j_star() != testing::max_yield(inst)) ++mismatches;
    }
    report(2, "trie oracle vs enumeration", mismatches == 0,
           std::to_string(mismatches) + " mismatches over " + std::to_string(checked) + " values", t.seconds());
}

void criterion3() {
    Timer t;
    int hits = 0;
    for (int i = 0; i < kInstances; ++i) {
        const auto inst = instance_for(i);
        const auto ov = compute_optimal(inst);
        const ReducedMDP mdp(inst);
        const auto r = rollout_greedy(as_policy(ov, greedy_policy(ov)), mdp, inst.max_path_length() + 1);
        if (!r.truncated && yield_of(inst, r.path) == ov.j_star()) ++hits;
    }
    report(3, "oracle rollout attains J*", hits == kInstances,
           std::to_string(hits) + "/" + std::to_string(kInstances) + " instances exact", t.seconds());
}

void criterion4() {
    Timer t;
    Rng rng(404);
    double worst = 0.0;
    int evaluated = 0;
    const double lambdas[] = {1.0, 10.0, 100.0};
    for (int i = 0; i < 100; ++i) {
        const auto base = instance_for(i + 5000);
        const double lambda = lambdas[i % 3];
        const auto& ab = base.alphabet();
        const auto trie = PrefixTrie::build(ab, base.feasible_paths());
        AdvantageModel m = i % 4 == 3
                               ? AdvantageModel::linear(ab, FeatureMap(FeatureKind::DepthEdgePair, ab.size()), 0.5)
                               : AdvantageModel::tabular(ab, trie, 0.5);
        randomize(m, rng, -0.5, 1.5, -6.0, 3.0);
        const auto p0 = StateWeighting::uniform_over_trie(trie);
        for (const auto noise : {NoiseModel::noiseless(), NoiseModel::bernoulli()}) {
            const PLInstance inst(ab, base.yields(), base.weights(), noise);
            const auto g = loss_identity_gap(m, inst, p0, PenaltyMix::fringe(inst), lambda);
            worst = std::max(worst, g.gap);
            ++evaluated;
        }
    }

    const auto e2 = fixture_e2(NoiseModel::bernoulli());
    const auto om = clamped_oracle_model(compute_optimal(e2));
    const auto p0 = StateWeighting::uniform_over_trie(PrefixTrie::build(e2.alphabet(), e2.feasible_paths()));
    double e2_err = 0.0;
    for (const double lambda : lambdas) {
        const double l = tar_loss(om, p0, RegressionTargets::exact(e2), lambda, 0.0).loss;
        e2_err = std::max(e2_err, std::abs(l - (0.625 + lambda / 12.0)));
    }
    report(4, "loss identity", worst <= 1e-9 && e2_err <= 1e-6,
           "max gap " + fmt("%.3g", worst) + " over " + std::to_string(evaluated) + " evaluations, fixture error " +
               fmt("%.3g", e2_err),
           t.seconds());
}

void criterion5() {
    Timer t;
    double worst = 0.0;
    bool paths_agree = true;
    const double lambda = 100.0, kappa = 1000.0;
    Rng rng(505);
    for (const auto& inst : {fixture_e1(), fixture_e2()}) {
        const auto& ab = inst.alphabet();
        const auto trie = PrefixTrie::build(ab, inst.feasible_paths());
        const auto p0 = StateWeighting::uniform_over_trie(trie);
        const auto tar = tar_objective(p0, RegressionTargets::exact(inst), lambda, kappa);
        const auto vlp = vlp_objective(p0, PenaltyMix::fringe(inst), inst, lambda, kappa);
        const double shift = lambda * noise_variance(inst) / 2.0;
        std::vector<PathSeq> paths;
        for (int k = 0; k < 20; ++k) {
            AdvantageModel m = AdvantageModel::tabular(ab, trie, 0.5);
            randomize(m, rng, 0.0, 1.0, -4.0, 2.0);
            TrainConfig cfg;
            cfg.lambda = lambda;
            cfg.kappa = kappa;
            const auto rt = train(m, tar, cfg);
            const auto rv = train(m, vlp, cfg);
            worst = std::max(worst, std::abs(rt.trace.back() - (rv.trace.back() + shift)));
            const auto len = default_max_len(m);
            paths.push_back(greedy_path(rt.model, len).path);
            paths.push_back(greedy_path(rv.model, len).path);
        }
        paths_agree = paths_agree && std::all_of(paths.begin(), paths.end(), [&](const PathSeq& p) { return p == paths[0]; });
    }
    report(5, "TAR and V-LP minimizers coincide", worst <= 1e-6 && paths_agree,
           "max objective difference " + fmt("%.3g", worst) + ", greedy paths " + (paths_agree ? "identical" : "differ"),
           t.seconds());
}

void criterion6() {
    Timer t;
    int good = 0, converged = 0;
    std::vector<double> misses;
    for (int i = 0; i < 100; ++i) {
        const auto inst = instance_for(i + 9000, NoiseModel::noiseless());
        const auto& ab = inst.alphabet();
        auto data = sample_dataset(inst, 10 * inst.feasible_paths().size(), static_cast<std::uint64_t>(i));
        for (const auto& p : inst.feasible_paths()) data.pairs.push_back({p, inst.yield(p)});

        const auto trie = PrefixTrie::build(ab, inst.feasible_paths());
        AdvantageModel m = AdvantageModel::tabular(ab, trie, 0.5);
        m.set_max_path_length(inst.max_path_length());
        TrainConfig cfg;
        const auto res = train(m, tar_objective(StateWeighting::uniform_over_trie(trie),
                                                RegressionTargets::empirical(ab, data), cfg.lambda, cfg.kappa),
                               cfg);
        converged += res.converged;
        const auto plan = evaluate_plan(greedy_path(res.model, default_max_len(res.model)), inst, compute_optimal(inst));
        if (*plan.regret <= 1e-6)
            ++good;
        else
            misses.push_back(*plan.regret);
    }
    std::string detail = std::to_string(good) + "/100 with regret <= 1e-6, " + std::to_string(converged) +
                         "/100 trainings converged";
    if (!misses.empty()) {
        std::sort(misses.begin(), misses.end());
        std::ostringstream os;
        os << "; remaining regrets:";
        for (const double r : misses) os << ' ' << fmt("%.3g", r);
        detail += os.str();
    }
    report(6, "end-to-end learning", good >= 90, detail, t.seconds());
}

void criterion7() {
    Timer t;
    Rng rng(707);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto inst = instance_for(i + 7000, i % 2 ? NoiseModel::bernoulli() : NoiseModel::noiseless());
        const auto& ab = inst.alphabet();
        const auto trie = PrefixTrie::build(ab, inst.feasible_paths());
        AdvantageModel m = i % 3 == 0 ? AdvantageModel::linear(ab, FeatureMap(i % 2 ? FeatureKind::EdgePair
                                                                                 : FeatureKind::DepthEdgePair,
                                                                        ab.size()),
                                                                0.5)
                                      : AdvantageModel::tabular(ab, trie, 0.5);
        randomize(m, rng, -0.5, 1.5, -4.0, 2.0);
        const auto p0 = StateWeighting::uniform_over_trie(trie);
        const auto mix = PenaltyMix::fringe(inst);
        const double lambda = 1.0 + 99.0 * rng.uniform();
        const double kappa = 10.0 * rng.uniform();
        const auto targets = i % 4 == 0 ? RegressionTargets::empirical(ab, sample_dataset(inst, 50, rng.next_u64()))
                                        : RegressionTargets::exact(inst);

        const auto tar = tar_loss(m, p0, targets, lambda, kappa);
        worst = std::max(worst, testing::relative_error(tar.grad, testing::central_difference(m, [&](const AdvantageModel& x) {
                                                            return tar_loss(x, p0, targets, lambda, kappa).loss;
                                                        })));
        const auto vlp = vlp_loss(m, p0, mix, inst, lambda, kappa);
        worst = std::max(worst, testing::relative_error(vlp.grad, testing::central_difference(m, [&](const AdvantageModel& x) {
                                                            return vlp_loss(x, p0, mix, inst, lambda, kappa).loss;
                                                        })));
    }
    report(7, "gradient correctness", worst <= 1e-5, "max relative error " + fmt("%.3g", worst), t.seconds());
}

void criterion8() {
    Timer t;
    Rng rng(808);
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto inst = instance_for(i % 200);
        const auto& ab = inst.alphabet();
        AdvantageModel m = i % 2 ? AdvantageModel::tabular(ab, PrefixTrie::build(ab, inst.feasible_paths()), 0.5)
                                 : AdvantageModel::linear(ab, FeatureMap(FeatureKind::DepthEdgePair, ab.size()), 0.5);
        randomize(m, rng, -1.0, 2.0, -6.0, 4.0);
        PathSeq s = testing::random_sequence(ab, rng, 8);
        if (i % 3 == 0) s = inst.feasible_paths()[rng.index(inst.feasible_paths().size())];
        const auto r = attribute(m, s);
        double acc = r.base;
        for (const auto& st : r.steps) acc += st.drawdown;
        const double v = predict_value(m, s);
        if (r.total != v || (!r.improper && acc != v)) ++mismatches;
    }
    const auto om = clamped_oracle_model(compute_optimal(fixture_e2()));
    const auto r = attribute(om, PathSeq{0, 1, 2});
    const bool fixture = r.steps.size() == 3 && std::abs(r.base - 0.9) <= 1e-6 &&
                         std::abs(r.steps[0].drawdown) <= 1e-6 && std::abs(r.steps[1].drawdown + 0.7) <= 1e-6 &&
                         std::abs(r.steps[2].drawdown) <= 1e-6 && std::abs(r.total - 0.2) <= 1e-6;
    report(8, "attribution additivity", mismatches == 0 && fixture,
           std::to_string(mismatches) + " discrepancies over 10000 pairs, fixture " + (fixture ? "matches" : "differs"),
           t.seconds());
}

int cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

bool pipeline(const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto f = [&](const char* name) { return (dir / name).string(); };
    return cli({"gen", "--actions", "4", "--depth", "4", "--paths", "12", "--seed", "21", "--noise", "bernoulli",
                "--out", f("inst.json")}) == 0 &&
           cli({"sample", "--instance", f("inst.json"), "--n", "400", "--seed", "22", "--out", f("data.jsonl"),
                "--rl-out", f("rl.jsonl")}) == 0 &&
           cli({"oracle", "--instance", f("inst.json"), "--out", f("oracle.json")}) == 0 &&
           cli({"train", "--instance", f("inst.json"), "--data", f("data.jsonl"), "--seed", "23", "--out",
                f("model.json"), "--report", f("train.json")}) == 0 &&
           cli({"train", "--instance", f("inst.json"), "--data", f("data.jsonl"), "--seed", "24", "--family", "linear",
                "--init", "random", "--out", f("linear.json")}) == 0 &&
           cli({"plan", "--model", f("model.json"), "--instance", f("inst.json"), "--out", f("plan.json")}) == 0 &&
           cli({"attribute", "--model", f("model.json"), "--path", "a,END", "--out", f("attr.json")}) == 0 &&
           cli({"verify", "--instance", f("inst.json"), "--report", f("verify.json")}) == 0;
}

bool round_trips(const fs::path& dir) {
    const auto text = [&](const char* name) { return io::read_text(dir / name); };
    const auto inst = io::instance_from_json(io::read_json(dir / "inst.json"));
    const auto& ab = inst.alphabet();
    bool ok = io::dump(io::instance_to_json(inst)) == text("inst.json");
    ok = ok && io::dataset_to_jsonl(ab, io::dataset_from_jsonl(ab, text("data.jsonl"))) == text("data.jsonl");
    ok = ok && io::rl_dataset_to_jsonl(ab, io::rl_dataset_from_jsonl(ab, text("rl.jsonl"))) == text("rl.jsonl");
    for (const char* m : {"model.json", "linear.json"})
        ok = ok && io::dump(io::model_to_json(io::model_from_json(io::read_json(dir / m)))) == text(m);
    ok = ok && io::dump(io::plan_to_json(ab, io::plan_from_json(ab, io::read_json(dir / "plan.json")))) ==
                   text("plan.json");
    ok = ok && io::dump(io::attribution_to_json(ab, io::attribution_from_json(ab, io::read_json(dir / "attr.json")))) ==
                   text("attr.json");
    ok = ok && io::dump(io::oracle_to_json(compute_optimal(inst))) == text("oracle.json");
    const auto p0 = StateWeighting::uniform_over_trie(PrefixTrie::build(ab, inst.feasible_paths()));
    const auto p0_text = io::dump(io::state_weighting_to_json(ab, p0));
    ok = ok && io::dump(io::state_weighting_to_json(ab, io::state_weighting_from_json(ab, io::json::parse(p0_text)))) ==
                   p0_text;
    return ok;
}

void criterion9() {
    Timer t;
    const fs::path root = fs::temp_directory_path() / "tarpath_acceptance";
    const bool ran = pipeline(root / "run1") && pipeline(root / "run2");
    std::size_t files = 0, differing = 0;
    if (ran) {
        for (const auto& entry : fs::directory_iterator(root / "run1")) {
            ++files;
            const auto name = entry.path().filename();
            if (io::read_text(entry.path()) != io::read_text(root / "run2" / name)) ++differing;
        }
    }
    const bool rt = ran && round_trips(root / "run1");
    fs::remove_all(root);
    report(9, "reproducibility", ran && differing == 0 && files > 0 && rt,
           std::string(ran ? "pipeline ran" : "pipeline failed") + ", " + std::to_string(differing) + "/" +
               std::to_string(files) + " artifacts differ, round-trip " + (rt ? "exact" : "broken"),
           t.seconds());
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                      criterion6, criterion7, criterion8, criterion9};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion raised: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
