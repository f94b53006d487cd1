#pragma once

// Experiment configuration: a single JSON document whose keys mirror the
// library's parameter names. parse_config(serialize_config(c)) == c.

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wavegraph/io.hpp"

#include "wavegraph/criterion.hpp"
#include "wavegraph/dynamics.hpp"
#include "wavegraph/error.hpp"
#include "wavegraph/geometry.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

struct GraphSpec {
    std::string generator = "lattice"; ///< lattice | tree | path | file
    int dimension = 1;
    int half_width = 10;
    int branching = 2;
    int depth = 3;
    int length = 10;
    std::string path;

    friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct PotentialSpec {
    std::string form = "constant"; ///< constant | radial_temporal | table
    double c = 1.0;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> values;

    friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

/// Initial datum on the vertices, described by its distance profile from x0.
struct DataSpec {
    std::string kind = "zero"; ///< zero | constant | gaussian | delta | random
    double amplitude = 1.0;
    double sigma = 2.0;        ///< gaussian: amplitude exp(-d^2 / (2 sigma^2))

    friend bool operator==(const DataSpec&, const DataSpec&) = default;
};

struct SimulationSpec {
    DataSpec u0, u1, v0, v1;
    std::optional<double> dt;  ///< none: cfl_dt(graph, dt_safety)
    double dt_safety = 0.5;
    double T = 10.0;
    double threshold = 1e8;
    std::size_t step_cap = 10'000'000;
    std::string coupling = "coupled"; ///< coupled | uncoupled
    std::string csv = "summary";      ///< full | summary

    friend bool operator==(const SimulationSpec&, const SimulationSpec&) = default;
};

struct LemmaSpec {
    std::string family = "sec3"; ///< sec3 | sec4
    std::vector<double> R_grid;  ///< empty: the top-level R grid
    double s = 6.0;              ///< sec4 power
    double points_per_unit = 16.0;

    friend bool operator==(const LemmaSpec&, const LemmaSpec&) = default;
};

struct WeakcheckSpec {
    std::string family = "sec3";
    double R = 4.0;
    std::optional<double> s;      ///< none: default_power(p, q)
    std::string equation = "u";   ///< u (h1, p) | v (h2, q)

    friend bool operator==(const WeakcheckSpec&, const WeakcheckSpec&) = default;
};

struct SweepSpec {
    std::vector<double> p_values;
    std::vector<double> q_values; ///< empty: diagonal p = q
    bool simulate = false;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
    GraphSpec graph;
    std::string metric = "l2"; ///< graph | l1 | l2 | table
    std::string metric_table;
    std::optional<Label> x0;   ///< none: lattice origin / tree root / vertex 0
    SystemParams params;
    PotentialSpec h1, h2;
    std::vector<double> R_grid; ///< empty: R0 * {1, 2, 4, 8}
    double tolerance = default_tolerance;
    std::string mode = "theorem1"; ///< theorem1 | theorem2 | theoremA
    double points_per_unit = 32.0;
    LemmaSpec lemma;
    SimulationSpec simulation;
    WeakcheckSpec weakcheck;
    SweepSpec sweep;
    std::uint64_t seed = 0;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const std::string& where) {
    if (!obj.is_object()) fail(ErrorKind::parse_error, where + " must be a JSON object");
    std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.contains(it.key())) fail(ErrorKind::parse_error, "unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const Json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse_error, std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
void read(const Json& obj, const char* key, std::optional<T>& out) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    T v{};
    read(obj, key, v);
    out = v;
}

template <class T>
Json opt(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

inline GraphSpec parse_graph_spec(const Json& j) {
    reject_unknown(j, {"generator", "dimension", "half_width", "branching", "depth", "length", "path"}, "graph");
    GraphSpec s;
    read(j, "generator", s.generator);
    read(j, "dimension", s.dimension);
    read(j, "half_width", s.half_width);
    read(j, "branching", s.branching);
    read(j, "depth", s.depth);
    read(j, "length", s.length);
    read(j, "path", s.path);
    return s;
}

inline PotentialSpec parse_potential(const Json& j, const char* where) {
    reject_unknown(j, {"form", "c", "a", "b", "values"}, where);
    PotentialSpec s;
    read(j, "form", s.form);
    read(j, "c", s.c);
    read(j, "a", s.a);
    read(j, "b", s.b);
    read(j, "values", s.values);
    if (s.form != "constant" && s.form != "radial_temporal" && s.form != "table")
        fail(ErrorKind::parse_error, std::string(where) + ": unknown potential form '" + s.form + "'");
    return s;
}

inline DataSpec parse_data(const Json& j, const char* where) {
    reject_unknown(j, {"kind", "amplitude", "sigma"}, where);
    DataSpec s;
    read(j, "kind", s.kind);
    read(j, "amplitude", s.amplitude);
    read(j, "sigma", s.sigma);
    return s;
}

inline Json data_json(const DataSpec& s) { return {{"kind", s.kind}, {"amplitude", s.amplitude}, {"sigma", s.sigma}}; }

inline Json potential_json(const PotentialSpec& s) {
    return {{"form", s.form}, {"c", s.c}, {"a", s.a}, {"b", s.b}, {"values", s.values}};
}

} // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
    using namespace detail;
    reject_unknown(j,
                   {"graph", "metric", "metric_table", "x0", "p", "q", "theta1", "theta2", "alpha", "delta", "R0",
                    "h1", "h2", "R_grid", "tolerance", "mode", "points_per_unit", "lemma", "simulation",
                    "weakcheck", "sweep", "seed"},
                   "config");
    ExperimentConfig c;
    if (j.contains("graph")) c.graph = parse_graph_spec(j.at("graph"));
    read(j, "metric", c.metric);
    read(j, "metric_table", c.metric_table);
    read(j, "x0", c.x0);
    read(j, "p", c.params.p);
    read(j, "q", c.params.q);
    read(j, "theta1", c.params.theta1);
    read(j, "theta2", c.params.theta2);
    read(j, "alpha", c.params.alpha);
    read(j, "delta", c.params.delta);
    read(j, "R0", c.params.R0);
    if (j.contains("h1")) c.h1 = parse_potential(j.at("h1"), "h1");
    if (j.contains("h2")) c.h2 = parse_potential(j.at("h2"), "h2");
    read(j, "R_grid", c.R_grid);
    read(j, "tolerance", c.tolerance);
    read(j, "mode", c.mode);
    read(j, "points_per_unit", c.points_per_unit);
    read(j, "seed", c.seed);
    if (j.contains("lemma")) {
        const Json& l = j.at("lemma");
        reject_unknown(l, {"family", "R_grid", "s", "points_per_unit"}, "lemma");
        read(l, "family", c.lemma.family);
        read(l, "R_grid", c.lemma.R_grid);
        read(l, "s", c.lemma.s);
        read(l, "points_per_unit", c.lemma.points_per_unit);
    }
    if (j.contains("simulation")) {
        const Json& s = j.at("simulation");
        reject_unknown(s, {"u0", "u1", "v0", "v1", "dt", "dt_safety", "T", "threshold", "step_cap", "coupling", "csv"},
                       "simulation");
        if (s.contains("u0")) c.simulation.u0 = parse_data(s.at("u0"), "simulation.u0");
        if (s.contains("u1")) c.simulation.u1 = parse_data(s.at("u1"), "simulation.u1");
        if (s.contains("v0")) c.simulation.v0 = parse_data(s.at("v0"), "simulation.v0");
        if (s.contains("v1")) c.simulation.v1 = parse_data(s.at("v1"), "simulation.v1");
        read(s, "dt", c.simulation.dt);
        read(s, "dt_safety", c.simulation.dt_safety);
        read(s, "T", c.simulation.T);
        read(s, "threshold", c.simulation.threshold);
        read(s, "step_cap", c.simulation.step_cap);
        read(s, "coupling", c.simulation.coupling);
        read(s, "csv", c.simulation.csv);
    }
    if (j.contains("weakcheck")) {
        const Json& w = j.at("weakcheck");
        reject_unknown(w, {"family", "R", "s", "equation"}, "weakcheck");
        read(w, "family", c.weakcheck.family);
        read(w, "R", c.weakcheck.R);
        read(w, "s", c.weakcheck.s);
        read(w, "equation", c.weakcheck.equation);
    }
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        reject_unknown(s, {"p_values", "q_values", "simulate"}, "sweep");
        read(s, "p_values", c.sweep.p_values);
        read(s, "q_values", c.sweep.q_values);
        read(s, "simulate", c.sweep.simulate);
    }
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::parse_error, std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::parse_error, "cannot open config '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

inline Json serialize_config(const ExperimentConfig& c) {
    using detail::opt;
    Json j;
    j["graph"] = {{"generator", c.graph.generator}, {"dimension", c.graph.dimension},
                  {"half_width", c.graph.half_width}, {"branching", c.graph.branching},
                  {"depth", c.graph.depth}, {"length", c.graph.length}, {"path", c.graph.path}};
    j["metric"] = c.metric;
    j["metric_table"] = c.metric_table;
    j["x0"] = opt(c.x0);
    j["p"] = c.params.p;
    j["q"] = c.params.q;
    j["theta1"] = c.params.theta1;
    j["theta2"] = c.params.theta2;
    j["alpha"] = c.params.alpha;
    j["delta"] = c.params.delta;
    j["R0"] = c.params.R0;
    j["h1"] = detail::potential_json(c.h1);
    j["h2"] = detail::potential_json(c.h2);
    j["R_grid"] = c.R_grid;
    j["tolerance"] = c.tolerance;
    j["mode"] = c.mode;
    j["points_per_unit"] = c.points_per_unit;
    j["seed"] = c.seed;
    j["lemma"] = {{"family", c.lemma.family}, {"R_grid", c.lemma.R_grid}, {"s", c.lemma.s},
                  {"points_per_unit", c.lemma.points_per_unit}};
    const auto& s = c.simulation;
    j["simulation"] = {{"u0", detail::data_json(s.u0)}, {"u1", detail::data_json(s.u1)},
                       {"v0", detail::data_json(s.v0)}, {"v1", detail::data_json(s.v1)},
                       {"dt", opt(s.dt)},           {"dt_safety", s.dt_safety},
                       {"T", s.T},                  {"threshold", s.threshold},
                       {"step_cap", s.step_cap},    {"coupling", s.coupling},
                       {"csv", s.csv}};
    j["weakcheck"] = {{"family", c.weakcheck.family}, {"R", c.weakcheck.R}, {"s", opt(c.weakcheck.s)},
                      {"equation", c.weakcheck.equation}};
    j["sweep"] = {{"p_values", c.sweep.p_values}, {"q_values", c.sweep.q_values}, {"simulate", c.sweep.simulate}};
    return j;
}

// ---------------------------------------------------------------------------
// Materialisation

inline WeightedGraph build_graph(const GraphSpec& s) {
    if (s.generator == "lattice") return generate_lattice(s.dimension, s.half_width);
    if (s.generator == "tree") return generate_tree(s.branching, s.depth);
    if (s.generator == "path") return generate_path(s.length);
    if (s.generator == "file") {
        std::ifstream in(s.path);
        if (!in) fail(ErrorKind::parse_error, "cannot open graph file '" + s.path + "'");
        return load_graph(in);
    }
    fail(ErrorKind::parse_error, "unknown graph generator '" + s.generator + "'");
}

inline PseudoMetric build_metric(const ExperimentConfig& c, const WeightedGraph& g) {
    if (c.metric == "graph") return PseudoMetric::graph_distance();
    if (c.metric == "l1") return PseudoMetric::lattice_l1();
    if (c.metric == "l2") return PseudoMetric::lattice_l2();
    if (c.metric == "table") {
        std::ifstream in(c.metric_table);
        if (!in) fail(ErrorKind::parse_error, "cannot open metric table '" + c.metric_table + "'");
        return load_table_metric(in, g);
    }
    fail(ErrorKind::parse_error, "unknown metric '" + c.metric + "'");
}

inline VertexId base_vertex(const ExperimentConfig& c, const WeightedGraph& g) {
    if (c.x0) return g.index_of(*c.x0);
    if (g.coordinates()) return lattice_origin(g);
    return 0;
}

inline Potential build_potential(const PotentialSpec& s) {
    if (s.form == "constant") return Potential::constant(s.c);
    if (s.form == "radial_temporal") return Potential::radial_temporal(s.a, s.b);
    if (s.form == "table") return Potential::table(s.values);
    fail(ErrorKind::parse_error, "unknown potential form '" + s.form + "'");
}

inline VertexFunction build_data(const DataSpec& s, std::span<const double> dist, std::mt19937_64& rng) {
    VertexFunction f(dist.size(), 0.0);
    if (s.kind == "zero") return f;
    if (s.kind == "constant") {
        std::fill(f.begin(), f.end(), s.amplitude);
        return f;
    }
    if (s.kind == "gaussian") {
        if (!(s.sigma > 0.0)) fail(ErrorKind::parse_error, "gaussian data needs sigma > 0");
        for (std::size_t x = 0; x < f.size(); ++x)
            f[x] = s.amplitude * std::exp(-dist[x] * dist[x] / (2.0 * s.sigma * s.sigma));
        return f;
    }
    if (s.kind == "delta") {
        for (std::size_t x = 0; x < f.size(); ++x)
            if (dist[x] == 0.0) f[x] = s.amplitude;
        return f;
    }
    if (s.kind == "random") {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (double& v : f) v = s.amplitude * unit(rng);
        return f;
    }
    fail(ErrorKind::parse_error, "unknown data kind '" + s.kind + "'");
}

inline std::vector<double> effective_r_grid(const ExperimentConfig& c) {
    return c.R_grid.empty() ? default_r_grid(c.params.R0, 4) : c.R_grid;
}

} // namespace wavegraph
