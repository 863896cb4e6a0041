#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mplex/rng.hpp"

namespace mplex {

// One undirected simple network layer. Neighbour lists are sorted, so
// has_edge is a binary search and iteration order is canonical.
struct Graph {
    int node_count = 0;
    std::vector<std::vector<int>> adj;
    std::size_t edge_count = 0;

    std::span<const int> neighbours(int v) const { return adj[static_cast<std::size_t>(v)]; }

    int degree(int v) const { return static_cast<int>(adj[static_cast<std::size_t>(v)].size()); }

    bool has_edge(int u, int v) const {
        const auto& nu = adj[static_cast<std::size_t>(u)];
        return std::binary_search(nu.begin(), nu.end(), v);
    }

    /// Edge list with u < v, sorted.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(edge_count);
        for (int u = 0; u < node_count; ++u)
            for (int v : adj[static_cast<std::size_t>(u)])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    // Builds a graph from an edge list. Self-loops and out-of-range endpoints
    // are rejected; duplicate edges collapse (union semantics).
    static Graph from_edges(int n, std::vector<std::pair<int, int>> es) {
        if (n < 0) throw std::invalid_argument("graph: node count must be non-negative");
        Graph g;
        g.node_count = n;
        g.adj.assign(static_cast<std::size_t>(n), {});
        for (auto& [u, v] : es) {
            if (u == v) throw std::invalid_argument("graph: self-loop rejected");
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw std::invalid_argument("graph: edge endpoint out of range");
            if (u > v) std::swap(u, v);
        }
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
        for (auto [u, v] : es) {
            g.adj[static_cast<std::size_t>(u)].push_back(v);
            g.adj[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
        g.edge_count = es.size();
        return g;
    }

    bool operator==(const Graph& other) const = default;
};

struct KRegularParams {
    int n = 0;  // nodes
    int k = 0;  // each node links to its next k ring neighbours (degree 2k)
};

struct ScaleFreeParams {
    int n = 0;  // nodes
    int d = 0;  // edges added per new node by preferential attachment
};

// Ring lattice: node i adjacent to (i+j) mod n for j = 1..k. Deterministic.
// When 2k >= n-1 the wrap-around duplicates collapse and the result is the
// complete graph.
inline Graph k_regular(const KRegularParams& p) {
    if (p.n < 3) throw std::invalid_argument("k_regular: n must be >= 3");
    if (p.k < 1) throw std::invalid_argument("k_regular: k must be >= 1");
    std::vector<std::pair<int, int>> es;
    es.reserve(static_cast<std::size_t>(p.n) * static_cast<std::size_t>(p.k));
    for (int i = 0; i < p.n; ++i)
        for (int j = 1; j <= p.k; ++j) es.emplace_back(i, (i + j) % p.n);
    return Graph::from_edges(p.n, std::move(es));
}

// Barabasi-Albert growth. Seed is d isolated nodes; each subsequent node
// attaches to d distinct existing nodes drawn with probability proportional
// to degree+1, without replacement within its attachment round. The +1 keeps
// zero-degree seed nodes reachable.
inline Graph scale_free(const ScaleFreeParams& p, Rng& rng) {
    if (p.d < 1) throw std::invalid_argument("scale_free: d must be >= 1");
    if (p.n < p.d) throw std::invalid_argument("scale_free: n must be >= d");
    std::vector<int> degree(static_cast<std::size_t>(p.n), 0);
    std::vector<std::pair<int, int>> es;
    es.reserve(static_cast<std::size_t>(p.d) * static_cast<std::size_t>(p.n - p.d));
    std::vector<int> candidates;
    std::vector<std::int64_t> weight;
    for (int t = p.d; t < p.n; ++t) {
        candidates.resize(static_cast<std::size_t>(t));
        weight.resize(static_cast<std::size_t>(t));
        std::int64_t total = 0;
        for (int i = 0; i < t; ++i) {
            candidates[static_cast<std::size_t>(i)] = i;
            weight[static_cast<std::size_t>(i)] = degree[static_cast<std::size_t>(i)] + 1;
            total += weight[static_cast<std::size_t>(i)];
        }
        int live = t;
        for (int e = 0; e < p.d; ++e) {
            // weighted draw over the still-unchosen candidates
            auto x = static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(total)));
            int idx = 0;
            std::int64_t acc = weight[0];
            while (acc <= x) acc += weight[static_cast<std::size_t>(++idx)];
            int chosen = candidates[static_cast<std::size_t>(idx)];
            total -= weight[static_cast<std::size_t>(idx)];
            candidates[static_cast<std::size_t>(idx)] = candidates[static_cast<std::size_t>(live - 1)];
            weight[static_cast<std::size_t>(idx)] = weight[static_cast<std::size_t>(live - 1)];
            --live;
            es.emplace_back(chosen, t);
            ++degree[static_cast<std::size_t>(chosen)];
            ++degree[static_cast<std::size_t>(t)];
        }
    }
    return Graph::from_edges(p.n, std::move(es));
}

/// Relabels nodes: node v becomes perm[v].
inline Graph relabel(const Graph& g, std::span<const int> perm) {
    if (static_cast<int>(perm.size()) != g.node_count)
        throw std::invalid_argument("relabel: permutation size mismatch");
    std::vector<std::pair<int, int>> es;
    es.reserve(g.edge_count);
    for (auto [u, v] : g.edges())
        es.emplace_back(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]);
    return Graph::from_edges(g.node_count, std::move(es));
}

/// Applies a uniformly random node permutation; the result is isomorphic to g.
inline Graph shuffle_labels(const Graph& g, Rng& rng) {
    return relabel(g, rng.permutation(g.node_count));
}

// Union of layer edge sets with duplicates collapsed. Analysis only; the
// simulation engine always works on the individual layers.
inline Graph merge_graphs(std::span<const Graph> layers) {
    if (layers.empty()) throw std::invalid_argument("merge_graphs: no layers");
    int n = layers.front().node_count;
    std::vector<std::pair<int, int>> es;
    for (const Graph& g : layers) {
        if (g.node_count != n)
            throw std::invalid_argument("merge_graphs: layers have mismatched node counts");
        auto le = g.edges();
        es.insert(es.end(), le.begin(), le.end());
    }
    return Graph::from_edges(n, std::move(es));
}

}  // namespace mplex
