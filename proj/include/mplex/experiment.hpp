#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mplex/engine.hpp"
#include "mplex/graph.hpp"
#include "mplex/io.hpp"
#include "mplex/metrics.hpp"
#include "mplex/rng.hpp"
#include "mplex/stats.hpp"

namespace mplex {

struct insufficient_data : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Topology { k_regular, scale_free, mixed };

inline const char* to_string(Topology t) {
    switch (t) {
        case Topology::k_regular: return "k-regular";
        case Topology::scale_free: return "scale-free";
        default: return "mixed";
    }
}

inline const char* to_string(Protocol p) {
    return p == Protocol::permeability ? "permeability" : "switching";
}

// One point of the sweep grid. id is unique within a sweep; structure_id
// drops the switching probabilities and is the join key between convergence
// results and network-property results.
struct Cell {
    std::string id;
    std::string structure_id;
    Protocol protocol = Protocol::permeability;
    Topology topology = Topology::k_regular;
    int layers = 1;
    int k = 0;  // 0 when the topology has no ring layer
    int d = 0;  // 0 when the topology has no scale-free layer
    std::vector<double> zeta;  // per-layer switch probabilities, empty for permeability
};

struct SweepSpec {
    Protocol protocol = Protocol::permeability;
    Topology topology = Topology::k_regular;
    std::vector<int> layer_counts{1};
    std::vector<int> k_values;
    std::vector<int> d_values;
    // Each grid entry is one switching-probability assignment: a single value
    // is broadcast to all layers, otherwise one value per layer is required.
    std::vector<std::vector<double>> zeta_grid;
    int runs_per_cell = 300;
    int instances = 100;
    int agents = 100;
    int max_cycles = 2000;
    std::uint64_t master_seed = 1;
    bool regenerate = true;  // fresh network instances for every run
    InitMode init = InitMode::random;
    LowDegreePolicy cc_policy = LowDegreePolicy::exclude;

    bool operator==(const SweepSpec&) const = default;
};

inline void validate(const SweepSpec& spec) {
    auto bad = [](const std::string& what) { throw std::invalid_argument("sweep spec: " + what); };
    if (spec.layer_counts.empty()) bad("layer_counts is empty");
    for (int l : spec.layer_counts)
        if (l < 1) bad("layer count must be >= 1");
    if (spec.topology == Topology::k_regular || spec.topology == Topology::mixed) {
        if (spec.k_values.empty()) bad("k_values is empty");
        for (int k : spec.k_values)
            if (k < 1) bad("k must be >= 1");
    }
    if (spec.topology == Topology::scale_free || spec.topology == Topology::mixed) {
        if (spec.d_values.empty()) bad("d_values is empty");
        for (int d : spec.d_values)
            if (d < 1) bad("d must be >= 1");
    }
    if (spec.topology == Topology::mixed)
        for (int l : spec.layer_counts)
            if (l != 2) bad("mixed topology is one ring layer plus one scale-free layer (layers=2)");
    if (spec.protocol == Protocol::switching) {
        if (spec.zeta_grid.empty()) bad("switching protocol needs a zeta grid");
        for (const auto& zs : spec.zeta_grid) {
            if (zs.empty()) bad("empty zeta grid entry");
            for (double z : zs)
                if (!(z >= 0.0 && z <= 1.0)) bad("zeta outside [0,1]");
        }
    } else if (!spec.zeta_grid.empty()) {
        bad("zeta grid only applies to the switching protocol");
    }
    if (spec.runs_per_cell < 1) bad("runs_per_cell must be >= 1");
    if (spec.instances < 1) bad("instances must be >= 1");
    if (spec.agents < 1) bad("agents must be >= 1");
    if (spec.max_cycles < 1) bad("max_cycles must be >= 1");
}

namespace detail {

inline std::string structure_name(Topology t, int layers, int k, int d) {
    switch (t) {
        case Topology::k_regular: return "kreg-L" + std::to_string(layers) + "-k" + std::to_string(k);
        case Topology::scale_free: return "sf-L" + std::to_string(layers) + "-d" + std::to_string(d);
        default:
            return "mixed-L" + std::to_string(layers) + "-k" + std::to_string(k) + "-d" +
                   std::to_string(d);
    }
}

// (layers, k, d) combinations in stable order; zeta handled by the caller.
inline std::vector<Cell> expand_structures(const SweepSpec& spec) {
    std::vector<Cell> out;
    for (int layers : spec.layer_counts) {
        auto push = [&](int k, int d) {
            Cell c;
            c.structure_id = structure_name(spec.topology, layers, k, d);
            c.id = c.structure_id;
            c.protocol = spec.protocol;
            c.topology = spec.topology;
            c.layers = layers;
            c.k = k;
            c.d = d;
            out.push_back(std::move(c));
        };
        switch (spec.topology) {
            case Topology::k_regular:
                for (int k : spec.k_values) push(k, 0);
                break;
            case Topology::scale_free:
                for (int d : spec.d_values) push(0, d);
                break;
            case Topology::mixed:
                for (int k : spec.k_values)
                    for (int d : spec.d_values) push(k, d);
                break;
        }
    }
    return out;
}

}  // namespace detail

inline std::vector<Cell> expand_cells(const SweepSpec& spec) {
    validate(spec);
    auto structures = detail::expand_structures(spec);
    if (spec.protocol != Protocol::switching) return structures;
    std::vector<Cell> out;
    for (const auto& s : structures) {
        for (const auto& zs : spec.zeta_grid) {
            if (zs.size() != 1 && zs.size() != static_cast<std::size_t>(s.layers))
                throw std::invalid_argument("sweep spec: zeta entry needs 1 or " +
                                            std::to_string(s.layers) + " values, got " +
                                            std::to_string(zs.size()));
            Cell c = s;
            c.zeta = zs.size() == 1 ? std::vector<double>(static_cast<std::size_t>(s.layers), zs[0])
                                    : zs;
            c.id += "-z" + join_doubles(zs, '_');
            out.push_back(std::move(c));
        }
    }
    return out;
}

// Per-run seed. Keyed by cell id so extending the grid never disturbs the
// random streams of existing cells.
inline std::uint64_t run_seed(std::uint64_t master, const std::string& cell_id, int run_index) {
    return derive_seed(master, fnv1a64(cell_id), static_cast<std::uint64_t>(run_index));
}

// Layer instances for one run. Every layer gets an independent label shuffle
// so identically-parameterised layers still differ. Draw order: per layer,
// generate then shuffle.
inline SocialSpace build_space(const Cell& cell, int agents, std::uint64_t net_seed) {
    Rng rng(net_seed);
    std::vector<Graph> layers;
    layers.reserve(static_cast<std::size_t>(cell.layers));
    switch (cell.topology) {
        case Topology::k_regular:
            for (int i = 0; i < cell.layers; ++i)
                layers.push_back(shuffle_labels(k_regular({agents, cell.k}), rng));
            break;
        case Topology::scale_free:
            for (int i = 0; i < cell.layers; ++i)
                layers.push_back(shuffle_labels(scale_free({agents, cell.d}, rng), rng));
            break;
        case Topology::mixed:
            layers.push_back(shuffle_labels(k_regular({agents, cell.k}), rng));
            layers.push_back(shuffle_labels(scale_free({agents, cell.d}, rng), rng));
            break;
    }
    SocialSpace space = make_space(std::move(layers));
    if (!cell.zeta.empty()) space.switching_probs = cell.zeta;
    return space;
}

struct RunRecord {
    std::uint64_t seed = 0;  // the per-run seed
    Protocol protocol = Protocol::permeability;
    bool converged = false;
    int cycles = 0;
    std::int64_t encounters = 0;
    std::optional<Opinion> final_opinion;
};

// Everything needed to reproduce a single run exactly.
struct RunSetup {
    Cell cell;
    int agents = 100;
    int max_cycles = 2000;
    InitMode init = InitMode::random;
    bool record_series = false;
    std::uint64_t seed = 0;      // per-run seed
    std::uint64_t net_seed = 0;  // network sub-seed (differs from seed's in frozen mode)
};

inline RunSetup make_setup(const SweepSpec& spec, const Cell& cell, int run_index,
                           bool record_series = false) {
    RunSetup rs;
    rs.cell = cell;
    rs.agents = spec.agents;
    rs.max_cycles = spec.max_cycles;
    rs.init = spec.init;
    rs.record_series = record_series;
    rs.seed = run_seed(spec.master_seed, cell.id, run_index);
    const auto net_base = spec.regenerate ? rs.seed : run_seed(spec.master_seed, cell.id, 0);
    rs.net_seed = substream(net_base, kNetworkStream);
    return rs;
}

inline RunResult execute(const RunSetup& rs) {
    SimConfig cfg;
    cfg.space = build_space(rs.cell, rs.agents, rs.net_seed);
    cfg.protocol = rs.cell.protocol;
    cfg.max_cycles = rs.max_cycles;
    cfg.seed = substream(rs.seed, kSimStream);
    cfg.record_series = rs.record_series;
    cfg.init = rs.init;
    return run_simulation(cfg);
}

struct CellResult {
    Cell cell;
    int run_count = 0;
    double convergence_ratio = 0.0;
    Summary encounters;
    std::vector<RunRecord> runs;  // filled only when requested
    std::string error;            // non-empty: cell skipped, no stats
};

struct PropertyResult {
    Cell structure;
    std::vector<GraphProperties> instances;
    Summary edges, clustering, path_length;
    std::string error;
};

struct SweepOptions {
    int workers = 1;
    bool keep_runs = false;
};

namespace detail {

// Static-slot work distribution: any worker count produces the same outputs
// because every task writes only its own slot.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    if (workers < 2 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    pool.reserve(n - 1);
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

inline std::vector<CellResult> run_sweep(const SweepSpec& spec, const SweepOptions& opt = {}) {
    const auto cells = expand_cells(spec);
    std::vector<CellResult> out(cells.size());
    std::vector<std::vector<RunRecord>> slots(cells.size());
    struct Task {
        std::size_t cell;
        int run;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        out[c].cell = cells[c];
        // infeasible parameters fail here, once, instead of aborting the sweep
        try {
            build_space(cells[c], spec.agents, substream(run_seed(spec.master_seed, cells[c].id, 0),
                                                         kNetworkStream));
        } catch (const std::exception& e) {
            out[c].error = e.what();
            continue;
        }
        slots[c].resize(static_cast<std::size_t>(spec.runs_per_cell));
        for (int r = 0; r < spec.runs_per_cell; ++r) tasks.push_back({c, r});
    }
    detail::parallel_for(tasks.size(), opt.workers, [&](std::size_t t) {
        const auto& task = tasks[t];
        const auto rs = make_setup(spec, cells[task.cell], task.run);
        const RunResult res = execute(rs);
        auto& rec = slots[task.cell][static_cast<std::size_t>(task.run)];
        rec.seed = rs.seed;
        rec.protocol = rs.cell.protocol;
        rec.converged = res.converged;
        rec.cycles = res.cycles_used;
        rec.encounters = res.encounters;
        rec.final_opinion = res.final_opinion;
    });
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!out[c].error.empty()) continue;
        auto& runs = slots[c];
        out[c].run_count = static_cast<int>(runs.size());
        int converged = 0;
        std::vector<double> enc;
        enc.reserve(runs.size());
        for (const auto& r : runs) {
            converged += r.converged ? 1 : 0;
            enc.push_back(static_cast<double>(r.encounters));
        }
        out[c].convergence_ratio = static_cast<double>(converged) / static_cast<double>(runs.size());
        out[c].encounters = summarize(std::move(enc));
        if (opt.keep_runs) out[c].runs = std::move(runs);
    }
    return out;
}

// Structural ensemble: per (layers, k, d) configuration, generate `instances`
// multiplexes with the same layer recipe the runs use, merge the layers and
// measure the merged graph.
inline std::vector<PropertyResult> network_property_sweep(const SweepSpec& spec,
                                                          const SweepOptions& opt = {}) {
    validate(spec);
    const auto structures = detail::expand_structures(spec);
    std::vector<PropertyResult> out(structures.size());
    std::vector<std::vector<std::string>> errors(structures.size());
    struct Task {
        std::size_t structure;
        int instance;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < structures.size(); ++s) {
        out[s].structure = structures[s];
        out[s].instances.resize(static_cast<std::size_t>(spec.instances));
        errors[s].resize(static_cast<std::size_t>(spec.instances));
        for (int i = 0; i < spec.instances; ++i) tasks.push_back({s, i});
    }
    detail::parallel_for(tasks.size(), opt.workers, [&](std::size_t t) {
        const auto& task = tasks[t];
        const auto& cell = structures[task.structure];
        const auto seed = derive_seed(spec.master_seed, fnv1a64(cell.structure_id),
                                      static_cast<std::uint64_t>(task.instance));
        try {
            const auto space = build_space(cell, spec.agents, substream(seed, kNetworkStream));
            const Graph merged = merge_graphs(space.layers);
            out[task.structure].instances[static_cast<std::size_t>(task.instance)] =
                graph_properties(merged, spec.cc_policy);
        } catch (const std::exception& e) {
            errors[task.structure][static_cast<std::size_t>(task.instance)] = e.what();
        }
    });
    for (std::size_t s = 0; s < structures.size(); ++s) {
        for (const auto& e : errors[s])
            if (!e.empty() && out[s].error.empty()) out[s].error = e;
        if (!out[s].error.empty()) {
            out[s].instances.clear();
            continue;
        }
        std::vector<double> edges, cc, apl;
        for (const auto& p : out[s].instances) {
            edges.push_back(static_cast<double>(p.edge_count));
            cc.push_back(p.clustering_coefficient);
            apl.push_back(p.avg_path_length);
        }
        out[s].edges = summarize(std::move(edges));
        out[s].clustering = summarize(std::move(cc));
        out[s].path_length = summarize(std::move(apl));
    }
    return out;
}

struct CorrelationRow {
    std::string family;
    std::string x;
    std::string y;
    CorrelationReport report;
};

// Join convergence cells with their structural ensembles and rank-correlate
// the convergence ratio against mean path length and mean clustering.
inline std::vector<CorrelationRow> correlate_structure_convergence(
    const std::string& family, const std::vector<CellResult>& cells,
    const std::vector<PropertyResult>& props) {
    std::map<std::string, std::pair<double, double>> structure;  // id -> (apl, cc)
    for (const auto& p : props)
        if (p.error.empty())
            structure[p.structure.structure_id] = {p.path_length.mean, p.clustering.mean};
    std::vector<double> cr, apl, cc;
    for (const auto& c : cells) {
        if (!c.error.empty()) continue;
        const auto it = structure.find(c.cell.structure_id);
        if (it == structure.end()) continue;
        cr.push_back(c.convergence_ratio);
        apl.push_back(it->second.first);
        cc.push_back(it->second.second);
    }
    if (cr.size() < 4)
        throw insufficient_data("correlate: only " + std::to_string(cr.size()) +
                                " matched cells, need at least 4");
    return {
        {family, "convergence_ratio", "avg_path_length", spearman(cr, apl)},
        {family, "convergence_ratio", "clustering_coefficient", spearman(cr, cc)},
    };
}

inline void write_sweep_csv(std::ostream& os, const std::vector<CellResult>& results) {
    os << "cell_id,protocol,layers,topology,k,d,zeta,runs,convergence_ratio,enc_mean,enc_sd,"
          "enc_min,enc_q1,enc_median,enc_q3,enc_max\n";
    for (const auto& r : results) {
        if (!r.error.empty()) continue;
        const auto& c = r.cell;
        os << c.id << ',' << to_string(c.protocol) << ',' << c.layers << ',' << to_string(c.topology)
           << ',';
        if (c.k > 0) os << c.k;
        os << ',';
        if (c.d > 0) os << c.d;
        os << ',' << join_doubles(c.zeta, '_') << ',' << r.run_count << ','
           << format_double(r.convergence_ratio) << ',' << format_double(r.encounters.mean) << ','
           << format_double(r.encounters.sd) << ',' << format_double(r.encounters.min) << ','
           << format_double(r.encounters.q1) << ',' << format_double(r.encounters.median) << ','
           << format_double(r.encounters.q3) << ',' << format_double(r.encounters.max) << '\n';
    }
}

inline void write_props_csv(std::ostream& os, const std::vector<PropertyResult>& results) {
    os << "config_id,instance,edges,clustering_coefficient,avg_path_length,reachable_fraction\n";
    for (const auto& r : results) {
        if (!r.error.empty()) continue;
        for (std::size_t i = 0; i < r.instances.size(); ++i) {
            const auto& p = r.instances[i];
            os << r.structure.structure_id << ',' << i << ',' << p.edge_count << ','
               << format_double(p.clustering_coefficient) << ',' << format_double(p.avg_path_length)
               << ',' << format_double(p.reachable_pair_fraction) << '\n';
        }
    }
}

inline void write_correlation_csv(std::ostream& os, const std::vector<CorrelationRow>& rows) {
    os << "family,x,y,rho,p_value,ci_low,ci_high\n";
    for (const auto& r : rows)
        os << r.family << ',' << r.x << ',' << r.y << ',' << format_double(r.report.rho) << ','
           << format_double(r.report.p_value) << ',' << format_double(r.report.ci_low) << ','
           << format_double(r.report.ci_high) << '\n';
}

inline void write_runs_csv(std::ostream& os, const std::vector<RunRecord>& runs) {
    os << "seed,protocol,converged,cycles,encounters,final_opinion\n";
    for (const auto& r : runs) {
        os << r.seed << ',' << to_string(r.protocol) << ',' << (r.converged ? 1 : 0) << ','
           << r.cycles << ',' << r.encounters << ',';
        if (r.final_opinion) os << static_cast<int>(*r.final_opinion);
        os << '\n';
    }
}

inline void write_series_csv(std::ostream& os, const std::vector<SeriesRecord>& series) {
    os << "cycle,count_opinion0,count_opinion1,mean_mem_diff,var_mem_diff\n";
    for (const auto& s : series)
        os << s.cycle << ',' << s.count_opinion0 << ',' << s.count_opinion1 << ','
           << format_double(s.mean_mem_diff) << ',' << format_double(s.var_mem_diff) << '\n';
}

}  // namespace mplex
