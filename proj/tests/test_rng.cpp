#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "mplex/rng.hpp"

using mplex::Rng;

TEST_CASE("mix64 maps distinct inputs to distinct scrambled outputs") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t x = 0; x < 4096; ++x) seen.insert(mplex::mix64(x));
    CHECK(seen.size() == 4096);
    CHECK(mplex::mix64(0) != 0);
}

TEST_CASE("fnv1a64 distinguishes ids and is stable") {
    CHECK(mplex::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(mplex::fnv1a64("kreg-L2-k10") != mplex::fnv1a64("kreg-L2-k1"));
    CHECK(mplex::fnv1a64("a") != mplex::fnv1a64("b"));
}

TEST_CASE("derive_seed is deterministic and collision-free over a sweep-sized grid") {
    std::set<std::uint64_t> seeds;
    for (int cell = 0; cell < 60; ++cell) {
        const auto h = mplex::fnv1a64("cell-" + std::to_string(cell));
        for (std::uint64_t run = 0; run < 400; ++run) seeds.insert(mplex::derive_seed(7, h, run));
    }
    CHECK(seeds.size() == 60u * 400u);
    CHECK(mplex::derive_seed(1, 2, 3) == mplex::derive_seed(1, 2, 3));
    CHECK(mplex::derive_seed(1, 2, 3) != mplex::derive_seed(2, 2, 3));
}

TEST_CASE("substream tags split a seed into unequal streams") {
    const std::uint64_t s = 123456789;
    CHECK(mplex::substream(s, mplex::kNetworkStream) != mplex::substream(s, mplex::kSimStream));
    CHECK(mplex::substream(s, mplex::kNetworkStream) != s);
}

TEST_CASE("equal seeds give identical streams, different seeds diverge") {
    Rng a(42), b(42), c(43);
    bool diverged = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next();
        CHECK(va == b.next());
        if (va != c.next()) diverged = true;
    }
    CHECK(diverged);
}

TEST_CASE("below stays in range and is roughly uniform") {
    Rng rng(7);
    const std::size_t n = 7;
    const int draws = 70000;
    std::vector<int> hist(n, 0);
    for (int i = 0; i < draws; ++i) {
        const std::size_t v = rng.below(n);
        REQUIRE(v < n);
        ++hist[v];
    }
    const double expected = static_cast<double>(draws) / static_cast<double>(n);
    for (int count : hist) {
        CHECK(count > expected * 0.93);
        CHECK(count < expected * 1.07);
    }
}

TEST_CASE("below handles degenerate and power-of-two bounds") {
    Rng rng(1);
    CHECK(rng.below(1) == 0);
    for (int i = 0; i < 200; ++i) CHECK(rng.below(2) < 2);
    for (int i = 0; i < 200; ++i) CHECK(rng.below(64) < 64);
    // n <= 1 must not consume stream state, so interleaving it is a no-op
    Rng x(5), y(5);
    (void)x.below(1);
    CHECK(x.next() == y.next());
}

TEST_CASE("unit produces doubles in [0, 1)") {
    Rng rng(11);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("chance respects degenerate probabilities") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) CHECK_FALSE(rng.chance(0.0));
    for (int i = 0; i < 100; ++i) CHECK(rng.chance(1.0));
}

TEST_CASE("shuffle permutes in place without losing elements") {
    Rng rng(9);
    std::vector<int> v(257);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    auto original = v;
    rng.shuffle(v);
    CHECK(v != original);  // astronomically unlikely to match for this seed
    std::sort(v.begin(), v.end());
    CHECK(v == original);
}

TEST_CASE("permutation covers all orders of a small set uniformly enough") {
    Rng rng(2024);
    std::map<std::vector<int>, int> freq;
    const int trials = 6000;
    for (int i = 0; i < trials; ++i) ++freq[rng.permutation(3)];
    REQUIRE(freq.size() == 6);
    for (const auto& [perm, count] : freq) {
        CHECK(count > 830);
        CHECK(count < 1170);
    }
}

TEST_CASE("permutation of size zero and one is trivial") {
    Rng rng(1);
    CHECK(rng.permutation(0).empty());
    CHECK(rng.permutation(1) == std::vector<int>{0});
}
