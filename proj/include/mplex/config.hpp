#pragma once

#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mplex/experiment.hpp"
#include "mplex/io.hpp"

namespace mplex {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A validated experiment description plus the CLI-facing switches that ride
// along in the same file.
struct ParsedConfig {
    SweepSpec spec;
    bool series = false;   // record per-cycle series (run/replay)
    bool shuffle = true;   // label-shuffle generated layers (gen-net only)
    bool seed_given = false;

    bool operator==(const ParsedConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> tokens(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

inline config_error at_line(int line, const std::string& what) {
    return config_error("config line " + std::to_string(line) + ": " + what);
}

inline double parse_double(int line, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty()) throw at_line(line, "not a number: '" + s + "'");
    return v;
}

inline long long parse_int(int line, const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty()) throw at_line(line, "not an integer: '" + s + "'");
    return v;
}

inline std::uint64_t parse_u64(int line, const std::string& s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty() || s[0] == '-')
        throw at_line(line, "not an unsigned integer: '" + s + "'");
    return v;
}

inline bool parse_bool(int line, const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw at_line(line, "expected true or false, got '" + s + "'");
}

inline std::vector<int> parse_int_list(int line, const std::string& s) {
    std::vector<int> out;
    for (const auto& t : tokens(s)) out.push_back(static_cast<int>(parse_int(line, t)));
    if (out.empty()) throw at_line(line, "empty list");
    return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Keep only values that survive serialization unchanged, so a normalized
// dump re-parses to the exact same spec.
inline double renormal(double v) { return std::strtod(format_double(v).c_str(), nullptr); }

// One grid token: "lo:hi:step" expands to symmetric values, "a/b/c" is one
// per-layer assignment, a bare number is one symmetric value.
inline void parse_zeta_token(int line, const std::string& t,
                             std::vector<std::vector<double>>& grid) {
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) throw at_line(line, "range must be lo:hi:step");
        const double lo = parse_double(line, parts[0]);
        const double hi = parse_double(line, parts[1]);
        const double step = parse_double(line, parts[2]);
        if (step <= 0.0) throw at_line(line, "range step must be positive");
        if (hi < lo) throw at_line(line, "range upper bound below lower bound");
        const auto count = static_cast<long long>((hi - lo) / step + 1e-9) + 1;
        for (long long i = 0; i < count; ++i)
            grid.push_back({renormal(lo + static_cast<double>(i) * step)});
        return;
    }
    if (t.find('/') != std::string::npos) {
        std::vector<double> zs;
        for (const auto& p : split(t, '/')) zs.push_back(renormal(parse_double(line, p)));
        grid.push_back(std::move(zs));
        return;
    }
    grid.push_back({renormal(parse_double(line, t))});
}

}  // namespace detail

inline ParsedConfig parse_config(const std::string& text) {
    ParsedConfig pc;
    SweepSpec& spec = pc.spec;
    spec.layer_counts.clear();  // distinguish "not given" from the default
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw detail::at_line(line_no, "expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw detail::at_line(line_no, "missing key");
        if (value.empty()) throw detail::at_line(line_no, "missing value for '" + key + "'");
        if (!seen.insert(key).second) throw detail::at_line(line_no, "duplicate key '" + key + "'");

        if (key == "protocol") {
            if (value == "permeability")
                spec.protocol = Protocol::permeability;
            else if (value == "switching")
                spec.protocol = Protocol::switching;
            else
                throw detail::at_line(line_no, "protocol must be permeability or switching");
        } else if (key == "topology") {
            if (value == "k-regular")
                spec.topology = Topology::k_regular;
            else if (value == "scale-free")
                spec.topology = Topology::scale_free;
            else if (value == "mixed")
                spec.topology = Topology::mixed;
            else
                throw detail::at_line(line_no, "topology must be k-regular, scale-free or mixed");
        } else if (key == "layers") {
            spec.layer_counts = detail::parse_int_list(line_no, value);
        } else if (key == "k") {
            spec.k_values = detail::parse_int_list(line_no, value);
        } else if (key == "d") {
            spec.d_values = detail::parse_int_list(line_no, value);
        } else if (key == "zeta") {
            for (const auto& t : detail::tokens(value))
                detail::parse_zeta_token(line_no, t, spec.zeta_grid);
        } else if (key == "runs") {
            spec.runs_per_cell = static_cast<int>(detail::parse_int(line_no, value));
        } else if (key == "instances") {
            spec.instances = static_cast<int>(detail::parse_int(line_no, value));
        } else if (key == "agents") {
            spec.agents = static_cast<int>(detail::parse_int(line_no, value));
        } else if (key == "max_cycles") {
            spec.max_cycles = static_cast<int>(detail::parse_int(line_no, value));
        } else if (key == "seed") {
            spec.master_seed = detail::parse_u64(line_no, value);
            pc.seed_given = true;
        } else if (key == "regenerate") {
            spec.regenerate = detail::parse_bool(line_no, value);
        } else if (key == "init") {
            if (value == "random")
                spec.init = InitMode::random;
            else if (value == "exact-split")
                spec.init = InitMode::exact_split;
            else
                throw detail::at_line(line_no, "init must be random or exact-split");
        } else if (key == "series") {
            pc.series = detail::parse_bool(line_no, value);
        } else if (key == "shuffle") {
            pc.shuffle = detail::parse_bool(line_no, value);
        } else if (key == "cc_low_degree") {
            if (value == "exclude")
                spec.cc_policy = LowDegreePolicy::exclude;
            else if (value == "zero")
                spec.cc_policy = LowDegreePolicy::count_as_zero;
            else
                throw detail::at_line(line_no, "cc_low_degree must be exclude or zero");
        } else {
            throw detail::at_line(line_no, "unknown key '" + key + "'");
        }
    }
    if (spec.layer_counts.empty()) spec.layer_counts = {1};
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return pc;
}

// Every effective setting on its own line; parsing the dump reproduces the
// configuration exactly.
inline std::string normalized_dump(const ParsedConfig& pc) {
    const SweepSpec& s = pc.spec;
    std::ostringstream out;
    out << "protocol = " << to_string(s.protocol) << '\n';
    out << "topology = " << to_string(s.topology) << '\n';
    out << "layers =";
    for (int l : s.layer_counts) out << ' ' << l;
    out << '\n';
    if (!s.k_values.empty()) {
        out << "k =";
        for (int k : s.k_values) out << ' ' << k;
        out << '\n';
    }
    if (!s.d_values.empty()) {
        out << "d =";
        for (int d : s.d_values) out << ' ' << d;
        out << '\n';
    }
    if (!s.zeta_grid.empty()) {
        out << "zeta =";
        for (const auto& zs : s.zeta_grid) out << ' ' << join_doubles(zs, '/');
        out << '\n';
    }
    out << "runs = " << s.runs_per_cell << '\n';
    out << "instances = " << s.instances << '\n';
    out << "agents = " << s.agents << '\n';
    out << "max_cycles = " << s.max_cycles << '\n';
    out << "seed = " << s.master_seed << '\n';
    out << "regenerate = " << (s.regenerate ? "true" : "false") << '\n';
    out << "init = " << (s.init == InitMode::random ? "random" : "exact-split") << '\n';
    out << "series = " << (pc.series ? "true" : "false") << '\n';
    out << "shuffle = " << (pc.shuffle ? "true" : "false") << '\n';
    out << "cc_low_degree = "
        << (s.cc_policy == LowDegreePolicy::exclude ? "exclude" : "zero") << '\n';
    return out.str();
}

}  // namespace mplex
