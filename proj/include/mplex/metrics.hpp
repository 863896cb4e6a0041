#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mplex/graph.hpp"

namespace mplex {

struct undefined_metric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GraphProperties {
    double avg_path_length = 0.0;
    double clustering_coefficient = 0.0;
    std::size_t edge_count = 0;
    double reachable_pair_fraction = 0.0;
};

struct PathLengthResult {
    double avg_path_length = 0.0;
    double reachable_pair_fraction = 0.0;
};

// Mean shortest-path hop count over unordered reachable pairs (BFS from every
// node), plus the fraction of pairs that are reachable at all. Throws when no
// pair is reachable.
inline PathLengthResult average_path_length(const Graph& g) {
    const int n = g.node_count;
    if (n < 2) throw std::invalid_argument("average_path_length: need at least 2 nodes");
    std::int64_t total = 0;
    std::int64_t reachable = 0;
    std::vector<int> dist(static_cast<std::size_t>(n));
    std::vector<int> queue(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[static_cast<std::size_t>(s)] = 0;
        int head = 0, tail = 0;
        queue[tail++] = s;
        while (head < tail) {
            int u = queue[head++];
            for (int v : g.neighbours(u)) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue[tail++] = v;
                }
            }
        }
        for (int t = s + 1; t < n; ++t) {
            if (dist[static_cast<std::size_t>(t)] > 0) {
                total += dist[static_cast<std::size_t>(t)];
                ++reachable;
            }
        }
    }
    if (reachable == 0) throw undefined_metric("average_path_length: no reachable pairs");
    const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    return {static_cast<double>(total) / static_cast<double>(reachable),
            static_cast<double>(reachable) / pairs};
}

enum class LowDegreePolicy {
    exclude,        // nodes with degree < 2 do not enter the average
    count_as_zero,  // they contribute a local coefficient of 0
};

// Watts-Strogatz local clustering, averaged. Local coefficient of v is
// 2*T(v) / (deg(v)*(deg(v)-1)) with T(v) the edge count among v's neighbours.
inline double clustering_coefficient(const Graph& g,
                                     LowDegreePolicy policy = LowDegreePolicy::exclude) {
    double sum = 0.0;
    int counted = 0;
    for (int v = 0; v < g.node_count; ++v) {
        const auto nb = g.neighbours(v);
        const int deg = static_cast<int>(nb.size());
        if (deg < 2) {
            if (policy == LowDegreePolicy::count_as_zero) ++counted;
            continue;
        }
        // 2*T(v) = sum over neighbours u of |N(u) ∩ N(v)|
        std::int64_t twice_triangles = 0;
        for (int u : nb) {
            const auto nu = g.neighbours(u);
            auto a = nb.begin();
            auto b = nu.begin();
            while (a != nb.end() && b != nu.end()) {
                if (*a < *b)
                    ++a;
                else if (*b < *a)
                    ++b;
                else {
                    ++twice_triangles;
                    ++a;
                    ++b;
                }
            }
        }
        const std::int64_t tri = twice_triangles / 2;
        sum += 2.0 * static_cast<double>(tri) / (static_cast<double>(deg) * (deg - 1));
        ++counted;
    }
    return counted == 0 ? 0.0 : sum / counted;
}

inline GraphProperties graph_properties(const Graph& g,
                                        LowDegreePolicy policy = LowDegreePolicy::exclude) {
    const auto pl = average_path_length(g);
    return {pl.avg_path_length, clustering_coefficient(g, policy), g.edge_count,
            pl.reachable_pair_fraction};
}

}  // namespace mplex
