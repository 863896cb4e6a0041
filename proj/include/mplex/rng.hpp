#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mplex {

// splitmix64 finalizer; used as the mixing step for all seed derivation.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Per-run seed: mix64 chain over (master, id hash, index). Stable across
// platforms and insensitive to grid shape, so adding cells to a sweep never
// perturbs the streams of existing cells.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id_hash,
                                           std::uint64_t index) {
    return mix64(mix64(mix64(master) ^ id_hash) ^ index);
}

// Sub-stream tags, folded into a run seed to split it into independent
// purpose-specific streams.
inline constexpr std::uint64_t kNetworkStream = 0x6e65747730303031ULL;
inline constexpr std::uint64_t kSimStream = 0x73696d7530303031ULL;

inline constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ tag);
}

// Deterministic random stream. mt19937_64 output is fixed by the standard and
// all bounded draws below avoid std::*_distribution (whose algorithms are
// implementation-defined), so equal seeds give equal streams everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform draw from [0, n). n must be > 0. Unbiased via mask rejection.
    std::size_t below(std::size_t n) {
        if (n <= 1) return 0;
        std::uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        for (;;) {
            std::uint64_t v = next() & mask;
            if (v < n) return static_cast<std::size_t>(v);
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    std::vector<int> permutation(int n) {
        std::vector<int> p(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
        shuffle(p);
        return p;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace mplex
