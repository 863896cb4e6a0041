#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mplex/graph.hpp"
#include "mplex/rng.hpp"

namespace mplex {

using Opinion = std::uint8_t;

struct Agent {
    Opinion opinion = 0;
    std::array<std::uint32_t, 2> memory{0, 0};
    std::uint32_t context = 0;  // layer index, used by the switching protocol
};

enum class Protocol { permeability, switching };

enum class InitMode { random, exact_split };

// The layers an agent population lives on, plus the per-layer probability of
// moving away from that layer after a step (switching protocol only).
struct SocialSpace {
    std::vector<Graph> layers;
    std::vector<double> switching_probs;
};

inline void validate(const SocialSpace& space) {
    if (space.layers.empty()) throw std::invalid_argument("social space: no layers");
    for (const auto& g : space.layers)
        if (g.node_count != space.layers.front().node_count)
            throw std::invalid_argument("social space: layers have mismatched node counts");
    if (space.switching_probs.size() != space.layers.size())
        throw std::invalid_argument("social space: one switching probability per layer required");
    for (double z : space.switching_probs)
        if (!(z >= 0.0 && z <= 1.0))
            throw std::invalid_argument("social space: switching probability outside [0,1]");
}

inline SocialSpace make_space(std::vector<Graph> layers) {
    SocialSpace s;
    s.switching_probs.assign(layers.size(), 0.0);
    s.layers = std::move(layers);
    return s;
}

struct SimConfig {
    SocialSpace space;
    Protocol protocol = Protocol::permeability;
    int max_cycles = 2000;
    std::uint64_t seed = 0;
    bool record_series = false;
    InitMode init = InitMode::random;
};

inline void validate(const SimConfig& cfg) {
    validate(cfg.space);
    if (cfg.max_cycles < 1) throw std::invalid_argument("sim config: max_cycles must be >= 1");
}

// Snapshot of the population taken at the end of a cycle (or at cycle 0,
// right after initialisation). mem_diff per agent is |memory[0] - memory[1]|;
// the variance is the sample variance across agents.
struct SeriesRecord {
    int cycle = 0;
    int count_opinion0 = 0;
    int count_opinion1 = 0;
    double mean_mem_diff = 0.0;
    double var_mem_diff = 0.0;
};

struct RunResult {
    bool converged = false;
    int cycles_used = 0;
    std::int64_t encounters = 0;
    std::int64_t failed_encounters = 0;
    std::optional<Opinion> final_opinion;
    std::vector<SeriesRecord> series;
};

// External Majority: record the observed opinion, adopt it only if it is now
// strictly ahead of the current one. Pure; ties keep the current opinion.
struct EmOutcome {
    std::array<std::uint32_t, 2> memory;
    Opinion opinion;
};

inline EmOutcome em_update(std::array<std::uint32_t, 2> memory, Opinion current,
                           Opinion observed) {
    ++memory[observed];
    const Opinion next = memory[observed] > memory[current] ? observed : current;
    return {memory, next};
}

struct SimState {
    const SimConfig* cfg = nullptr;
    std::vector<Agent> agents;
    int cycles_used = 0;
    std::int64_t encounters = 0;
    std::int64_t failed_encounters = 0;
    std::vector<SeriesRecord> series;

    std::vector<int> order;    // reused each cycle
    std::vector<int> scratch;  // same-context neighbour buffer
};

inline SeriesRecord series_record(const SimState& st) {
    SeriesRecord rec;
    rec.cycle = st.cycles_used;
    const auto n = st.agents.size();
    double sum = 0.0;
    for (const auto& a : st.agents) {
        if (a.opinion == 0)
            ++rec.count_opinion0;
        else
            ++rec.count_opinion1;
        const double d0 = a.memory[0];
        const double d1 = a.memory[1];
        sum += d0 > d1 ? d0 - d1 : d1 - d0;
    }
    if (n == 0) return rec;
    rec.mean_mem_diff = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& a : st.agents) {
        const double d0 = a.memory[0];
        const double d1 = a.memory[1];
        const double diff = (d0 > d1 ? d0 - d1 : d1 - d0) - rec.mean_mem_diff;
        ss += diff * diff;
    }
    rec.var_mem_diff = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return rec;
}

// Opinions first (uniform, or an exact half/half split shuffled into place),
// then contexts for the switching protocol. Memory starts empty.
inline SimState init_run(const SimConfig& cfg, Rng& rng) {
    validate(cfg);
    SimState st;
    st.cfg = &cfg;
    const int n = cfg.space.layers.front().node_count;
    st.agents.assign(static_cast<std::size_t>(n), Agent{});
    if (cfg.init == InitMode::random) {
        for (auto& a : st.agents) a.opinion = static_cast<Opinion>(rng.below(2));
    } else {
        std::vector<Opinion> pool(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < pool.size(); ++i)
            pool[i] = i < pool.size() - pool.size() / 2 ? 0 : 1;
        rng.shuffle(pool);
        for (std::size_t i = 0; i < pool.size(); ++i) st.agents[i].opinion = pool[i];
    }
    if (cfg.protocol == Protocol::switching) {
        const auto layer_count = cfg.space.layers.size();
        for (auto& a : st.agents) a.context = static_cast<std::uint32_t>(rng.below(layer_count));
    }
    st.order.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) st.order[static_cast<std::size_t>(i)] = i;
    if (cfg.record_series) st.series.push_back(series_record(st));
    return st;
}

// One permeability step: pick a layer, then a neighbour there. An empty
// neighbourhood means no encounter; the layer is not resampled.
inline bool step_permeability(SimState& st, int agent_id, Rng& rng) {
    const auto& layers = st.cfg->space.layers;
    const auto layer = rng.below(layers.size());
    const auto nb = layers[layer].neighbours(agent_id);
    if (nb.empty()) return false;
    const int partner = nb[rng.below(nb.size())];
    Agent& a = st.agents[static_cast<std::size_t>(agent_id)];
    const auto out = em_update(a.memory, a.opinion, st.agents[static_cast<std::size_t>(partner)].opinion);
    a.memory = out.memory;
    a.opinion = out.opinion;
    return true;
}

// One switching step: partners are neighbours in the agent's current layer
// that are themselves active there. The switch roll happens whether or not
// anyone was available; with a single layer there is nowhere to go.
inline bool step_switching(SimState& st, int agent_id, Rng& rng) {
    const auto& space = st.cfg->space;
    Agent& a = st.agents[static_cast<std::size_t>(agent_id)];
    const auto layer = static_cast<std::size_t>(a.context);
    st.scratch.clear();
    for (int v : space.layers[layer].neighbours(agent_id))
        if (st.agents[static_cast<std::size_t>(v)].context == a.context)
            st.scratch.push_back(v);
    bool met = false;
    if (!st.scratch.empty()) {
        const int partner = st.scratch[rng.below(st.scratch.size())];
        const auto out =
            em_update(a.memory, a.opinion, st.agents[static_cast<std::size_t>(partner)].opinion);
        a.memory = out.memory;
        a.opinion = out.opinion;
        met = true;
    }
    if (rng.chance(space.switching_probs[layer]) && space.layers.size() > 1) {
        const auto j = rng.below(space.layers.size() - 1);
        a.context = static_cast<std::uint32_t>(j >= layer ? j + 1 : j);
    }
    return met;
}

inline bool is_consensus(const SimState& st) {
    for (const auto& a : st.agents)
        if (a.opinion != st.agents.front().opinion) return false;
    return true;  // vacuously true for an empty population
}

// Every agent acts once, in a fresh random order. Updates are sequential:
// later agents see opinions already changed this cycle.
inline void run_cycle(SimState& st, Rng& rng) {
    rng.shuffle(st.order);
    const bool switching = st.cfg->protocol == Protocol::switching;
    for (int id : st.order) {
        const bool met =
            switching ? step_switching(st, id, rng) : step_permeability(st, id, rng);
        if (met)
            ++st.encounters;
        else
            ++st.failed_encounters;
    }
    ++st.cycles_used;
    if (st.cfg->record_series) st.series.push_back(series_record(st));
}

// Whole run: cycles until everyone agrees or the cycle budget is spent.
// Consensus is checked between cycles, never mid-cycle.
inline RunResult run_simulation(const SimConfig& cfg) {
    Rng rng(cfg.seed);
    SimState st = init_run(cfg, rng);
    bool done = is_consensus(st);
    while (!done && st.cycles_used < cfg.max_cycles) {
        run_cycle(st, rng);
        done = is_consensus(st);
    }
    RunResult res;
    res.converged = done;
    res.cycles_used = st.cycles_used;
    res.encounters = st.encounters;
    res.failed_encounters = st.failed_encounters;
    if (done && !st.agents.empty()) res.final_opinion = st.agents.front().opinion;
    res.series = std::move(st.series);
    return res;
}

}  // namespace mplex
