#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "support/generators.hpp"
#include "tarpath/errors.hpp"
#include "tarpath/io.hpp"

using namespace tarpath;
namespace fs = std::filesystem;

namespace {
constexpr TokenId a = 0, b = 1, END = 2;
}

TEST_CASE("dump prints round-trippable floats and null for non-finite") {
    const double x = 0.1 + 0.2;
    io::json j = {{"x", x}, {"bad", std::numeric_limits<double>::infinity()}};
    const auto text = io::dump(j);
    const auto back = io::json::parse(text);
    CHECK(back["x"].get<double>() == x);
    CHECK(back["bad"].is_null());
    CHECK(io::dump(j, -1).find('\n') == std::string::npos);
}

TEST_CASE("alphabet and path round-trip") {
    const auto ab = ActionAlphabet::letters(4);
    CHECK(io::alphabet_from_json(io::alphabet_to_json(ab)) == ab);
    const PathSeq p{a, b, ab.terminal()};
    CHECK(io::path_to_json(ab, p) == io::json({"a", "b", "END"}));
    CHECK(io::path_from_json(ab, io::path_to_json(ab, p)) == p);
    CHECK_THROWS_AS((void)io::path_from_json(ab, io::json({"a", "zz"})), Error);
}

TEST_CASE("instance round-trip") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = testing::small_instance(seed, seed % 2 ? NoiseModel::bernoulli()
                                                                 : NoiseModel::truncated_gaussian(0.25));
        const auto back = io::instance_from_json(io::json::parse(io::dump(io::instance_to_json(inst))));
        CHECK(back == inst);
    }
    CHECK(io::instance_from_json(io::instance_to_json(fixture_e2())) == fixture_e2());
    CHECK_THROWS_AS((void)io::instance_from_json(io::json::object()), Error);
}

TEST_CASE("dataset JSON Lines round-trip") {
    const auto e2 = fixture_e2(NoiseModel::truncated_gaussian(0.3));
    const auto data = sample_dataset(e2, 100, 5);
    const auto text = io::dataset_to_jsonl(e2.alphabet(), data);
    CHECK(io::dataset_from_jsonl(e2.alphabet(), text, data.seed) == data);

    const auto rl = build_offline_dataset(e2, data, 6);
    CHECK(io::rl_dataset_from_jsonl(e2.alphabet(), io::rl_dataset_to_jsonl(e2.alphabet(), rl), rl.seed) == rl);
    CHECK_THROWS_AS((void)io::dataset_from_jsonl(e2.alphabet(), "{\"path\": [\"a\"]}\n"), Error);
}

TEST_CASE("model round-trip") {
    Rng rng(2);
    const auto e2 = fixture_e2();
    auto tab = AdvantageModel::tabular(e2.alphabet(), PrefixTrie::build(e2.alphabet(), e2.feasible_paths()), 0.5);
    tab.set_max_path_length(3);
    randomize(tab, rng, 0.0, 1.0, -3.0, 3.0);
    const auto tab_back = io::model_from_json(io::json::parse(io::dump(io::model_to_json(tab))));
    CHECK(tab_back == tab);
    CHECK(tab_back.max_path_length() == 3);

    auto lin = AdvantageModel::linear(e2.alphabet(), FeatureMap(FeatureKind::DepthEdgePair, 3), 0.2);
    randomize(lin, rng, 0.0, 1.0, -3.0, 3.0);
    CHECK(io::model_from_json(io::json::parse(io::dump(io::model_to_json(lin)))) == lin);
}

TEST_CASE("state weighting, plan and attribution round-trip") {
    const auto e2 = fixture_e2();
    const auto& ab = e2.alphabet();
    const auto p0 = StateWeighting::uniform_over_trie(PrefixTrie::build(ab, e2.feasible_paths()));
    const auto p0_back = io::state_weighting_from_json(ab, io::state_weighting_to_json(ab, p0));
    CHECK(p0_back.states == p0.states);
    CHECK(p0_back.weights == p0.weights);

    const auto m = clamped_oracle_model(compute_optimal(e2));
    const auto plan = evaluate_plan(greedy_path(m, 5), e2, compute_optimal(e2));
    const auto plan_back = io::plan_from_json(ab, io::json::parse(io::dump(io::plan_to_json(ab, plan))));
    CHECK(plan_back.path == plan.path);
    CHECK(plan_back.predicted_value == plan.predicted_value);
    CHECK(plan_back.true_yield == plan.true_yield);
    CHECK(plan_back.regret == plan.regret);
    CHECK(plan_back.truncated == plan.truncated);

    const auto rep = attribute(m, PathSeq{a, b, END});
    const auto rep_back = io::attribution_from_json(ab, io::json::parse(io::dump(io::attribution_to_json(ab, rep))));
    CHECK(rep_back.path == rep.path);
    CHECK(rep_back.base == rep.base);
    CHECK(rep_back.total == rep.total);
    REQUIRE(rep_back.steps.size() == rep.steps.size());
    for (std::size_t i = 0; i < rep.steps.size(); ++i) {
        CHECK(rep_back.steps[i].prefix == rep.steps[i].prefix);
        CHECK(rep_back.steps[i].action == rep.steps[i].action);
        CHECK(rep_back.steps[i].drawdown == rep.steps[i].drawdown);
    }
}

TEST_CASE("write_atomic and read_text") {
    const fs::path dir = fs::temp_directory_path() / "tarpath_io_test";
    fs::create_directories(dir);
    const fs::path f = dir / "x.json";
    io::write_atomic(f, "hello\n");
    CHECK(io::read_text(f) == "hello\n");
    io::write_atomic(f, "{\"k\": 1}");
    CHECK(io::read_json(f)["k"] == 1);
    CHECK_THROWS_AS((void)io::read_text(dir / "missing.json"), Error);
    fs::remove_all(dir);
}
