#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mplex/graph.hpp"

namespace mplex {

// Fixed formatting so identical results serialize to identical bytes
// everywhere. Nine significant digits is enough for every value we emit.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::string join_doubles(const std::vector<double>& vs, char sep) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += sep;
        out += format_double(vs[i]);
    }
    return out;
}

// Edge list: "n <node_count>" header, then one "u v" line per edge with
// u < v, sorted. Graph::edges() already yields that order.
inline void write_edge_list(std::ostream& os, const Graph& g) {
    os << "n " << g.node_count << '\n';
    for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

inline Graph read_edge_list(std::istream& is) {
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": " + what);
    };
    int n = -1;
    std::vector<std::pair<int, int>> es;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        if (n < 0) {
            std::string tag;
            if (!(ss >> tag >> n) || tag != "n" || n < 0) fail("expected header 'n <node_count>'");
            continue;
        }
        int u = 0, v = 0;
        if (!(ss >> u >> v)) fail("expected '<u> <v>'");
        std::string extra;
        if (ss >> extra) fail("trailing content");
        es.emplace_back(u, v);
    }
    ++line_no;
    if (n < 0) fail("missing header");
    try {
        return Graph::from_edges(n, std::move(es));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("edge list: ") + e.what());
    }
}

}  // namespace mplex
