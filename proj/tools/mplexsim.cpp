// Command-line front end: experiment configs in, CSV/edge-list files out.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mplex/config.hpp"
#include "mplex/engine.hpp"
#include "mplex/experiment.hpp"
#include "mplex/graph.hpp"
#include "mplex/io.hpp"
#include "mplex/metrics.hpp"

namespace {

struct Opts {
    std::string config_path;
    std::string out_path;
    std::string net_path;
    std::string sweep_csv;
    std::string props_csv;
    std::string family = "sweep";
    std::string cell_id;
    int run_index = 0;
    int workers = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool full_scale = false;
    bool series = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mplex::config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Seed resolution order: --seed flag, config value, then a fresh random one.
// Whatever wins is echoed in the normalized dump, so runs stay replayable.
mplex::ParsedConfig load_config(const Opts& o) {
    auto pc = mplex::parse_config(read_file(o.config_path));
    if (o.seed_set) {
        pc.spec.master_seed = o.seed;
        pc.seed_given = true;
    } else if (!pc.seed_given) {
        std::random_device rd;
        pc.spec.master_seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        pc.seed_given = true;
    }
    if (o.full_scale) pc.spec.runs_per_cell = 3000;
    if (o.series) pc.series = true;
    std::cerr << mplex::normalized_dump(pc);
    return pc;
}

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        os = &file;
    }
};

mplex::Cell single_structure(const mplex::SweepSpec& spec) {
    auto structural = spec;
    structural.protocol = mplex::Protocol::permeability;
    structural.zeta_grid.clear();
    const auto cells = mplex::expand_cells(structural);
    if (cells.size() != 1)
        throw mplex::config_error("config: expected a single network configuration, grid has " +
                                  std::to_string(cells.size()));
    return cells.front();
}

int cmd_gen_net(const Opts& o) {
    const auto pc = load_config(o);
    const auto cell = single_structure(pc.spec);
    const auto seed = mplex::derive_seed(pc.spec.master_seed, mplex::fnv1a64(cell.structure_id), 0);
    const auto net_seed = mplex::substream(seed, mplex::kNetworkStream);
    mplex::Graph merged;
    if (pc.shuffle) {
        merged = mplex::merge_graphs(mplex::build_space(cell, pc.spec.agents, net_seed).layers);
    } else {
        mplex::Rng rng(net_seed);
        std::vector<mplex::Graph> layers;
        for (int i = 0; i < cell.layers; ++i) {
            if (cell.topology == mplex::Topology::k_regular ||
                (cell.topology == mplex::Topology::mixed && i == 0))
                layers.push_back(mplex::k_regular({pc.spec.agents, cell.k}));
            else
                layers.push_back(mplex::scale_free({pc.spec.agents, cell.d}, rng));
        }
        merged = mplex::merge_graphs(layers);
    }
    Output out(o.out_path);
    mplex::write_edge_list(*out.os, merged);
    return 0;
}

int cmd_net_props(const Opts& o) {
    mplex::LowDegreePolicy policy = mplex::LowDegreePolicy::exclude;
    if (!o.net_path.empty()) {
        if (!o.config_path.empty()) policy = load_config(o).spec.cc_policy;
        std::ifstream in(o.net_path);
        if (!in) throw std::runtime_error("cannot open network file: " + o.net_path);
        const auto g = mplex::read_edge_list(in);
        const auto p = mplex::graph_properties(g, policy);
        Output out(o.out_path);
        *out.os << "config_id,instance,edges,clustering_coefficient,avg_path_length,"
                   "reachable_fraction\n"
                << o.net_path << ",0," << p.edge_count << ','
                << mplex::format_double(p.clustering_coefficient) << ','
                << mplex::format_double(p.avg_path_length) << ','
                << mplex::format_double(p.reachable_pair_fraction) << '\n';
        return 0;
    }
    if (o.config_path.empty())
        throw mplex::config_error("net-props needs --config or --net");
    const auto pc = load_config(o);
    const auto results = mplex::network_property_sweep(pc.spec, {.workers = o.workers});
    Output out(o.out_path);
    mplex::write_props_csv(*out.os, results);
    int failures = 0;
    for (const auto& r : results)
        if (!r.error.empty()) {
            std::cerr << "config " << r.structure.structure_id << ": " << r.error << '\n';
            ++failures;
        }
    return failures == 0 ? 0 : 1;
}

int cmd_run(const Opts& o) {
    const auto pc = load_config(o);
    const auto cells = mplex::expand_cells(pc.spec);
    if (cells.size() != 1)
        throw mplex::config_error("config: run needs a single-cell config, grid has " +
                                  std::to_string(cells.size()) + " cells");
    const auto results = mplex::run_sweep(pc.spec, {.workers = o.workers, .keep_runs = true});
    const auto& r = results.front();
    if (!r.error.empty()) {
        std::cerr << "cell " << r.cell.id << ": " << r.error << '\n';
        return 1;
    }
    Output out(o.out_path);
    mplex::write_runs_csv(*out.os, r.runs);
    return 0;
}

int cmd_sweep(const Opts& o) {
    const auto pc = load_config(o);
    const auto results = mplex::run_sweep(pc.spec, {.workers = o.workers});
    Output out(o.out_path);
    mplex::write_sweep_csv(*out.os, results);
    int failures = 0;
    for (const auto& r : results)
        if (!r.error.empty()) {
            std::cerr << "cell " << r.cell.id << ": " << r.error << '\n';
            ++failures;
        }
    return failures == 0 ? 0 : 1;
}

int cmd_replay(const Opts& o) {
    const auto pc = load_config(o);
    const auto cells = mplex::expand_cells(pc.spec);
    const mplex::Cell* cell = nullptr;
    for (const auto& c : cells)
        if (c.id == o.cell_id) cell = &c;
    if (!cell) throw mplex::config_error("replay: cell '" + o.cell_id + "' is not in the config grid");
    if (o.run_index < 0 || o.run_index >= pc.spec.runs_per_cell)
        throw mplex::config_error("replay: run index " + std::to_string(o.run_index) +
                                  " outside 0.." + std::to_string(pc.spec.runs_per_cell - 1));
    const auto rs = mplex::make_setup(pc.spec, *cell, o.run_index, pc.series);
    const auto res = mplex::execute(rs);
    Output out(o.out_path);
    if (pc.series) {
        mplex::write_series_csv(*out.os, res.series);
    } else {
        mplex::RunRecord rec;
        rec.seed = rs.seed;
        rec.protocol = cell->protocol;
        rec.converged = res.converged;
        rec.cycles = res.cycles_used;
        rec.encounters = res.encounters;
        rec.final_opinion = res.final_opinion;
        mplex::write_runs_csv(*out.os, {rec});
    }
    return 0;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw std::runtime_error(where + ": bad number '" + s + "'");
    return v;
}

std::string structure_of(const std::string& cell_id) {
    const auto pos = cell_id.rfind("-z");
    return pos == std::string::npos ? cell_id : cell_id.substr(0, pos);
}

int cmd_correlate(const Opts& o) {
    if (o.sweep_csv.empty() || o.props_csv.empty())
        throw mplex::config_error("correlate needs --sweep-csv and --props-csv");

    std::ifstream sin(o.sweep_csv);
    if (!sin) throw std::runtime_error("cannot open " + o.sweep_csv);
    std::string line;
    if (!std::getline(sin, line) || split_csv(line).front() != "cell_id")
        throw std::runtime_error(o.sweep_csv + ": not a sweep CSV");
    std::vector<mplex::CellResult> cells;
    while (std::getline(sin, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 9) throw std::runtime_error(o.sweep_csv + ": short row");
        mplex::CellResult r;
        r.cell.id = f[0];
        r.cell.structure_id = structure_of(f[0]);
        r.convergence_ratio = to_double(f[8], o.sweep_csv);
        cells.push_back(std::move(r));
    }

    std::ifstream pin(o.props_csv);
    if (!pin) throw std::runtime_error("cannot open " + o.props_csv);
    if (!std::getline(pin, line) || split_csv(line).front() != "config_id")
        throw std::runtime_error(o.props_csv + ": not a properties CSV");
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> byid;  // cc, apl
    while (std::getline(pin, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 6) throw std::runtime_error(o.props_csv + ": short row");
        auto it = byid.find(f[0]);
        if (it == byid.end()) {
            order.push_back(f[0]);
            it = byid.emplace(f[0], std::pair<std::vector<double>, std::vector<double>>{}).first;
        }
        it->second.first.push_back(to_double(f[3], o.props_csv));
        it->second.second.push_back(to_double(f[4], o.props_csv));
    }
    std::vector<mplex::PropertyResult> props;
    for (const auto& id : order) {
        const auto& [cc, apl] = byid[id];
        mplex::PropertyResult p;
        p.structure.structure_id = id;
        p.clustering = mplex::summarize(cc);
        p.path_length = mplex::summarize(apl);
        props.push_back(std::move(p));
    }

    const auto rows = mplex::correlate_structure_convergence(o.family, cells, props);
    Output out(o.out_path);
    mplex::write_correlation_csv(*out.os, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consensus games on multiplex networks"};
    app.require_subcommand(1);
    Opts o;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* cfg = sub->add_option("--config", o.config_path, "experiment config file");
        if (config_required) cfg->required();
        sub->add_option("--out", o.out_path, "output file (default: stdout)");
        sub->add_option("--seed", o.seed, "master seed (overrides config)")
            ->each([&](const std::string&) { o.seed_set = true; });
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--full-scale", o.full_scale, "3000 runs per cell");
        sub->add_flag("--series", o.series, "record per-cycle series");
        return sub;
    };

    auto* gen = add_common(app.add_subcommand("gen-net", "generate one merged network"), true);
    auto* props = add_common(
        app.add_subcommand("net-props", "structural properties of network ensembles"), false);
    props->add_option("--net", o.net_path, "measure one edge-list file instead");
    add_common(app.add_subcommand("run", "per-run records for a single cell"), true);
    add_common(app.add_subcommand("sweep", "convergence statistics over a config grid"), true);
    auto* corr = app.add_subcommand("correlate", "rank-correlate convergence with structure");
    corr->add_option("--sweep-csv", o.sweep_csv, "sweep output CSV")->required();
    corr->add_option("--props-csv", o.props_csv, "net-props output CSV")->required();
    corr->add_option("--family", o.family, "label for the family column");
    corr->add_option("--out", o.out_path, "output file (default: stdout)");
    auto* replay = add_common(app.add_subcommand("replay", "re-execute one recorded run"), true);
    replay->add_option("--cell", o.cell_id, "cell id to replay")->required();
    replay->add_option("--run", o.run_index, "run index within the cell");
    (void)gen;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("gen-net")) return cmd_gen_net(o);
        if (app.got_subcommand("net-props")) return cmd_net_props(o);
        if (app.got_subcommand("run")) return cmd_run(o);
        if (app.got_subcommand("sweep")) return cmd_sweep(o);
        if (app.got_subcommand("correlate")) return cmd_correlate(o);
        if (app.got_subcommand("replay")) return cmd_replay(o);
    } catch (const mplex::config_error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
