#include <array>
#include <cstdint>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "mplex/engine.hpp"
#include "mplex/graph.hpp"
#include "mplex/rng.hpp"
#include "oracles.hpp"

using mplex::Agent;
using mplex::Graph;
using mplex::InitMode;
using mplex::Protocol;
using mplex::Rng;
using mplex::SimConfig;

namespace {

SimConfig basic_config(std::vector<Graph> layers, Protocol proto = Protocol::permeability) {
    SimConfig cfg;
    cfg.space = mplex::make_space(std::move(layers));
    cfg.protocol = proto;
    return cfg;
}

}  // namespace

TEST_CASE("memory update adopts an opinion only when it pulls strictly ahead") {
    const auto fresh = mplex::em_update({0, 0}, 0, 1);
    CHECK(fresh.memory == std::array<std::uint32_t, 2>{0, 1});
    CHECK(fresh.opinion == 1);

    const auto tie = mplex::em_update({1, 0}, 0, 1);
    CHECK(tie.memory == std::array<std::uint32_t, 2>{1, 1});
    CHECK(tie.opinion == 0);

    const auto confirm = mplex::em_update({3, 1}, 0, 0);
    CHECK(confirm.memory == std::array<std::uint32_t, 2>{4, 1});
    CHECK(confirm.opinion == 0);

    const auto overtake = mplex::em_update({2, 2}, 1, 0);
    CHECK(overtake.memory == std::array<std::uint32_t, 2>{3, 2});
    CHECK(overtake.opinion == 0);
}

TEST_CASE("memory update matches the literal rule on every small counter state") {
    int cases = 0;
    for (std::uint32_t m0 = 0; m0 <= 10; ++m0)
        for (std::uint32_t m1 = 0; m1 <= 10; ++m1)
            for (mplex::Opinion cur = 0; cur < 2; ++cur)
                for (mplex::Opinion obs = 0; obs < 2; ++obs) {
                    const auto got = mplex::em_update({m0, m1}, cur, obs);
                    const auto want = oracle::em_literal({m0, m1}, cur, obs);
                    REQUIRE(got.memory == want.memory);
                    REQUIRE(got.opinion == want.opinion);
                    ++cases;
                }
    CHECK(cases == 484);
}

TEST_CASE("literal and argmax readings of the rule agree on reachable states") {
    // from zeroed memory the current opinion's counter never trails, so only
    // states with memory[cur] >= memory[other] can occur in a run
    for (std::uint32_t m0 = 0; m0 <= 10; ++m0)
        for (std::uint32_t m1 = 0; m1 <= 10; ++m1)
            for (mplex::Opinion cur = 0; cur < 2; ++cur) {
                if ((cur == 0 ? m0 : m1) < (cur == 0 ? m1 : m0)) continue;
                for (mplex::Opinion obs = 0; obs < 2; ++obs) {
                    const auto lit = oracle::em_literal({m0, m1}, cur, obs);
                    const auto arg = oracle::em_argmax({m0, m1}, cur, obs);
                    REQUIRE(lit.memory == arg.memory);
                    REQUIRE(lit.opinion == arg.opinion);
                }
            }
}

TEST_CASE("agents start with empty memory and near-even opinions") {
    auto cfg = basic_config({mplex::k_regular({100, 10})});
    double ones = 0.0;
    const int trials = 400;
    for (int s = 0; s < trials; ++s) {
        Rng rng(static_cast<std::uint64_t>(s));
        const auto st = mplex::init_run(cfg, rng);
        REQUIRE(st.agents.size() == 100);
        for (const auto& a : st.agents) {
            REQUIRE(a.memory == std::array<std::uint32_t, 2>{0, 0});
            REQUIRE(a.context == 0);  // permeability leaves everyone on layer 0
            ones += a.opinion;
        }
    }
    const double fraction = ones / (100.0 * trials);
    CHECK_THAT(fraction, Catch::Matchers::WithinAbs(0.5, 0.01));
}

TEST_CASE("exact split seeds exactly half the population with each opinion") {
    for (int n : {100, 7, 2}) {
        auto cfg = basic_config({mplex::k_regular({std::max(n, 3), 1})});
        if (n == 2) cfg.space = mplex::make_space({Graph::from_edges(2, {{0, 1}})});
        if (n == 7) cfg.space = mplex::make_space({mplex::k_regular({7, 1})});
        cfg.init = InitMode::exact_split;
        Rng rng(17);
        const auto st = mplex::init_run(cfg, rng);
        int zeros = 0;
        for (const auto& a : st.agents) zeros += a.opinion == 0;
        CHECK(zeros == n - n / 2);
    }
}

TEST_CASE("switching contexts start uniform over layers") {
    auto cfg = basic_config(
        {mplex::k_regular({100, 2}), mplex::k_regular({100, 2}), mplex::k_regular({100, 2}),
         mplex::k_regular({100, 2})},
        Protocol::switching);
    std::array<double, 4> counts{};
    const int trials = 500;
    for (int s = 0; s < trials; ++s) {
        Rng rng(static_cast<std::uint64_t>(1000 + s));
        const auto st = mplex::init_run(cfg, rng);
        for (const auto& a : st.agents) counts[a.context] += 1.0;
    }
    for (double c : counts) CHECK_THAT(c / trials, Catch::Matchers::WithinAbs(25.0, 1.0));
}

TEST_CASE("an agent with no neighbours anywhere never meets anyone") {
    // node 0 is isolated on both layers
    auto cfg = basic_config(
        {Graph::from_edges(3, {{1, 2}}), Graph::from_edges(3, {{1, 2}})});
    Rng rng(5);
    auto st = mplex::init_run(cfg, rng);
    const auto before = st.agents[0];
    for (int i = 0; i < 50; ++i) CHECK_FALSE(mplex::step_permeability(st, 0, rng));
    CHECK(st.agents[0].memory == before.memory);
    CHECK(st.agents[0].opinion == before.opinion);
}

TEST_CASE("two opposed agents on one edge agree after a single cycle") {
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        auto cfg = basic_config({Graph::from_edges(2, {{0, 1}})});
        cfg.init = InitMode::exact_split;
        cfg.seed = seed;
        const auto res = mplex::run_simulation(cfg);
        CHECK(res.converged);
        CHECK(res.cycles_used == 1);
        CHECK(res.encounters == 2);
        CHECK(res.failed_encounters == 0);
        REQUIRE(res.final_opinion.has_value());
    }
}

TEST_CASE("every encounter succeeds on a connected single layer") {
    auto cfg = basic_config({mplex::k_regular({100, 10})});
    cfg.seed = 99;
    const auto res = mplex::run_simulation(cfg);
    CHECK(res.failed_encounters == 0);
    CHECK(res.encounters == 100 * static_cast<std::int64_t>(res.cycles_used));
}

TEST_CASE("successful encounters equal total memory gained") {
    auto cfg = basic_config({mplex::k_regular({50, 3}), mplex::k_regular({50, 3})});
    Rng rng(31);
    auto st = mplex::init_run(cfg, rng);
    for (int c = 0; c < 40; ++c) mplex::run_cycle(st, rng);
    std::int64_t total_memory = 0;
    for (const auto& a : st.agents) total_memory += a.memory[0] + a.memory[1];
    CHECK(total_memory == st.encounters);
    CHECK(st.encounters + st.failed_encounters == 50 * 40);
}

TEST_CASE("an agent's own counter never trails its rival during a run") {
    auto cfg = basic_config({mplex::k_regular({40, 2}), mplex::k_regular({40, 2})});
    Rng rng(8);
    auto st = mplex::init_run(cfg, rng);
    for (int c = 0; c < 60; ++c) {
        mplex::run_cycle(st, rng);
        for (const auto& a : st.agents)
            REQUIRE(a.memory[a.opinion] >= a.memory[1 - a.opinion]);
    }
}

TEST_CASE("consensus is absorbing") {
    auto cfg = basic_config({mplex::k_regular({10, 5})});  // complete graph
    Rng rng(12);
    auto st = mplex::init_run(cfg, rng);
    int guard = 0;
    while (!mplex::is_consensus(st) && guard++ < 2000) mplex::run_cycle(st, rng);
    REQUIRE(mplex::is_consensus(st));
    const auto settled = st.agents.front().opinion;
    for (int c = 0; c < 100; ++c) mplex::run_cycle(st, rng);
    for (const auto& a : st.agents) CHECK(a.opinion == settled);
}

TEST_CASE("zero switching probability freezes contexts") {
    auto cfg = basic_config({mplex::k_regular({30, 2}), mplex::k_regular({30, 2})},
                            Protocol::switching);
    cfg.space.switching_probs = {0.0, 0.0};
    Rng rng(21);
    auto st = mplex::init_run(cfg, rng);
    std::vector<std::uint32_t> initial;
    for (const auto& a : st.agents) initial.push_back(a.context);
    for (int c = 0; c < 30; ++c) mplex::run_cycle(st, rng);
    for (std::size_t i = 0; i < st.agents.size(); ++i) CHECK(st.agents[i].context == initial[i]);
}

TEST_CASE("certain switching on two layers alternates contexts every cycle") {
    auto cfg = basic_config({mplex::k_regular({20, 2}), mplex::k_regular({20, 2})},
                            Protocol::switching);
    cfg.space.switching_probs = {1.0, 1.0};
    Rng rng(33);
    auto st = mplex::init_run(cfg, rng);
    for (int c = 0; c < 10; ++c) {
        std::vector<std::uint32_t> before;
        for (const auto& a : st.agents) before.push_back(a.context);
        mplex::run_cycle(st, rng);
        for (std::size_t i = 0; i < st.agents.size(); ++i)
            REQUIRE(st.agents[i].context == 1 - before[i]);
    }
}

TEST_CASE("a lone agent in its context misses the encounter but still switches") {
    auto cfg = basic_config(
        {Graph::from_edges(3, {{0, 1}, {0, 2}}), Graph::from_edges(3, {{0, 1}, {0, 2}})},
        Protocol::switching);
    cfg.space.switching_probs = {1.0, 1.0};
    Rng rng(44);
    auto st = mplex::init_run(cfg, rng);
    st.agents[0] = Agent{0, {0, 0}, 0};
    st.agents[1] = Agent{1, {0, 0}, 1};
    st.agents[2] = Agent{1, {0, 0}, 1};

    // neighbours exist on layer 0 but none share agent 0's context
    CHECK_FALSE(mplex::step_switching(st, 0, rng));
    CHECK(st.agents[0].memory == std::array<std::uint32_t, 2>{0, 0});
    CHECK(st.agents[0].opinion == 0);
    CHECK(st.agents[0].context == 1);  // the switch roll still happened

    // now agent 1 sees agent 0 on layer 1 and records its opinion
    CHECK(mplex::step_switching(st, 1, rng));
    CHECK(st.agents[1].memory == std::array<std::uint32_t, 2>{1, 0});
}

TEST_CASE("single-layer switching cannot move anywhere") {
    auto cfg = basic_config({mplex::k_regular({10, 2})}, Protocol::switching);
    cfg.space.switching_probs = {1.0};
    Rng rng(3);
    auto st = mplex::init_run(cfg, rng);
    for (int c = 0; c < 20; ++c) mplex::run_cycle(st, rng);
    for (const auto& a : st.agents) CHECK(a.context == 0);
}

TEST_CASE("switching with zero probability matches the single-layer baseline") {
    const auto ring = mplex::k_regular({100, 10});
    int conv_perm = 0, conv_switch = 0;
    const int runs = 300;
    for (int i = 0; i < runs; ++i) {
        auto perm = basic_config({ring});
        perm.seed = mplex::derive_seed(1, mplex::fnv1a64("zeta0-perm"), static_cast<std::uint64_t>(i));
        conv_perm += mplex::run_simulation(perm).converged;

        auto sw = basic_config({ring}, Protocol::switching);
        sw.space.switching_probs = {0.0};
        sw.seed = mplex::derive_seed(1, mplex::fnv1a64("zeta0-switch"), static_cast<std::uint64_t>(i));
        conv_switch += mplex::run_simulation(sw).converged;
    }
    const double diff = std::abs(conv_perm - conv_switch) / static_cast<double>(runs);
    CHECK(diff <= 0.08);
}

TEST_CASE("identical seeds reproduce a run exactly") {
    auto cfg = basic_config({mplex::k_regular({60, 4}), mplex::k_regular({60, 4})},
                            Protocol::switching);
    cfg.space.switching_probs = {0.3, 0.6};
    cfg.seed = 777;
    cfg.record_series = true;
    const auto a = mplex::run_simulation(cfg);
    const auto b = mplex::run_simulation(cfg);
    CHECK(a.converged == b.converged);
    CHECK(a.cycles_used == b.cycles_used);
    CHECK(a.encounters == b.encounters);
    CHECK(a.failed_encounters == b.failed_encounters);
    CHECK(a.final_opinion == b.final_opinion);
    REQUIRE(a.series.size() == b.series.size());
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        CHECK(a.series[i].count_opinion0 == b.series[i].count_opinion0);
        CHECK(a.series[i].mean_mem_diff == b.series[i].mean_mem_diff);
        CHECK(a.series[i].var_mem_diff == b.series[i].var_mem_diff);
    }
}

TEST_CASE("series recording starts at cycle zero and tracks population counts") {
    auto cfg = basic_config({mplex::k_regular({20, 10})});
    cfg.record_series = true;
    cfg.seed = 5;
    const auto res = mplex::run_simulation(cfg);
    REQUIRE(!res.series.empty());
    CHECK(res.series.front().cycle == 0);
    CHECK(res.series.front().mean_mem_diff == 0.0);
    for (const auto& rec : res.series)
        CHECK(rec.count_opinion0 + rec.count_opinion1 == 20);
    CHECK(static_cast<int>(res.series.size()) == res.cycles_used + 1);
    if (res.converged) {
        const auto& last = res.series.back();
        CHECK((last.count_opinion0 == 0 || last.count_opinion1 == 0));
    }
}

TEST_CASE("an empty population is vacuously in consensus") {
    auto cfg = basic_config({Graph::from_edges(0, {})});
    const auto res = mplex::run_simulation(cfg);
    CHECK(res.converged);
    CHECK(res.cycles_used == 0);
    CHECK_FALSE(res.final_opinion.has_value());
}

TEST_CASE("configuration validation rejects inconsistent spaces") {
    mplex::SocialSpace empty;
    CHECK_THROWS_AS(mplex::validate(empty), std::invalid_argument);

    mplex::SocialSpace mismatched;
    mismatched.layers = {mplex::k_regular({10, 1}), mplex::k_regular({11, 1})};
    mismatched.switching_probs = {0.0, 0.0};
    CHECK_THROWS_AS(mplex::validate(mismatched), std::invalid_argument);

    mplex::SocialSpace bad_prob;
    bad_prob.layers = {mplex::k_regular({10, 1})};
    bad_prob.switching_probs = {1.5};
    CHECK_THROWS_AS(mplex::validate(bad_prob), std::invalid_argument);

    auto cfg = basic_config({mplex::k_regular({10, 1})});
    cfg.max_cycles = 0;
    CHECK_THROWS_AS(mplex::validate(cfg), std::invalid_argument);
}
