#include <doctest.h>

#include <map>

#include "tarpath/errors.hpp"
#include "tarpath/oracle.hpp"
#include "tarpath/reduction.hpp"

using namespace tarpath;

namespace {
constexpr TokenId a = 0, b = 1, END = 2;
}

TEST_CASE("transition appends") {
    const auto ab = ActionAlphabet::letters(3);
    CHECK(transition(ab, {}, a) == PathSeq{a});
    CHECK(transition(ab, PathSeq{a}, END) == PathSeq{a, END});
    CHECK(transition(ab, PathSeq{a, END}, a) == PathSeq{a, END, a});
    CHECK_THROWS_AS((void)transition(ab, {}, 5), Error);
}

TEST_CASE("sample_reward") {
    const auto e2 = fixture_e2();
    const ReducedMDP mdp(e2);
    Rng rng(1);
    for (TokenId t = 0; t < 3; ++t) {
        CHECK(sample_reward(mdp, PathSeq{a, a, END}, t, rng) == 0.9);
        CHECK(sample_reward(mdp, PathSeq{a}, t, rng) == 0.0);
    }
    const auto noisy = fixture_e2(NoiseModel::bernoulli());
    const ReducedMDP mdp2(noisy);
    for (int i = 0; i < 200; ++i) CHECK(sample_reward(mdp2, PathSeq{a, END, b}, a, rng) == 0.0);
}

TEST_CASE("marginal is P_Psi times uniform action") {
    const auto e2 = fixture_e2();
    const ReducedMDP mdp(e2);
    CHECK(mdp.marginal(PathSeq{b, END}, a) == doctest::Approx(1.0 / 9.0));
    CHECK(mdp.marginal(PathSeq{b}, a) == 0.0);
}

TEST_CASE("build_offline_dataset") {
    const auto e1 = fixture_e1();
    CHECK(build_offline_dataset(e1, PathYieldDataset{}, 3).transitions.empty());

    PathYieldDataset data;
    data.pairs = {{PathSeq{a, END}, 0.8}};
    // Search for a seed whose action draw is b to pin the example transition.
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 64 && !seen; ++seed) {
        const auto rl = build_offline_dataset(e1, data, seed);
        REQUIRE(rl.transitions.size() == 1);
        const auto& t = rl.transitions[0];
        CHECK(t.s == PathSeq{a, END});
        CHECK(t.r == 0.8);
        CHECK(t.s_next == transition(e1.alphabet(), t.s, t.a));
        if (t.a == b) {
            CHECK(t.s_next == PathSeq{a, END, b});
            seen = true;
        }
    }
    CHECK(seen);

    PathYieldDataset bad;
    bad.pairs = {{PathSeq{a, b, END}, 0.1}};
    CHECK_THROWS_AS((void)build_offline_dataset(e1, bad, 0), Error);
}

TEST_CASE("offline actions are uniform") {
    const auto e2 = fixture_e2();
    const auto data = sample_dataset(e2, 30000, 8);
    const auto rl = build_offline_dataset(e2, data, 9);
    std::map<TokenId, int> counts;
    for (const auto& t : rl.transitions) ++counts[t.a];
    for (TokenId t = 0; t < 3; ++t) CHECK(std::abs(counts[t] / 30000.0 - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("rollout_greedy") {
    const auto e2 = fixture_e2();
    const ReducedMDP mdp2(e2);
    const auto ov2 = compute_optimal(e2);
    CHECK(rollout_greedy(as_policy(ov2, greedy_policy(ov2)), mdp2, 10).path == PathSeq{a, a, END});

    const auto e1 = fixture_e1();
    const ReducedMDP mdp1(e1);
    const auto ov1 = compute_optimal(e1);
    CHECK(rollout_greedy(as_policy(ov1, greedy_policy(ov1)), mdp1, 10).path == PathSeq{a, END});

    const Policy stop = [](const PathSeq&) { return std::optional<TokenId>(END); };
    CHECK(rollout_greedy(stop, mdp2, 10).path == PathSeq{END});

    const Policy loop = [](const PathSeq&) { return std::optional<TokenId>(a); };
    const auto r = rollout_greedy(loop, mdp2, 4);
    CHECK(r.truncated);
    CHECK(r.path == PathSeq{a, a, a, a});

    const Policy partial = [](const PathSeq& s) { return s.size() == 0 ? std::optional<TokenId>(a) : std::nullopt; };
    CHECK_THROWS_AS((void)rollout_greedy(partial, mdp2, 4), Error);
}
