#pragma once

// Command-line front end. run_cli is the whole program; tools/main.cpp only
// forwards argv so the commands can be driven from tests.
//
// Exit codes: 0 success, 1 runtime error or negative result, 2 usage or
// config errors.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "wavegraph/config.hpp"
#include "wavegraph/criterion.hpp"
#include "wavegraph/cutoffs.hpp"
#include "wavegraph/dynamics.hpp"
#include "wavegraph/geometry.hpp"
#include "wavegraph/graph.hpp"
#include "wavegraph/io.hpp"

namespace wavegraph {

inline constexpr const char* sweep_csv_header = "p,q,crit_exponent,fitted_exponent,verdict,blowup_time";

namespace cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GraphFlags {
    std::optional<int> lattice;
    int half_width = 10;
    std::optional<int> tree;
    int depth = 3;
    std::optional<int> path;
    std::string file;

    bool given() const { return lattice || tree || path || !file.empty(); }
};

inline void add_graph_flags(CLI::App* cmd, GraphFlags& f, bool with_file) {
    cmd->add_option("--lattice", f.lattice, "lattice dimension N (1..4)");
    cmd->add_option("--half-width", f.half_width, "lattice half width L");
    cmd->add_option("--tree", f.tree, "tree branching factor");
    cmd->add_option("--depth", f.depth, "tree depth");
    cmd->add_option("--path", f.path, "path graph vertex count");
    if (with_file) cmd->add_option("--graph", f.file, "graph file");
}

inline WeightedGraph graph_from_flags(const GraphFlags& f) {
    const int chosen = int(f.lattice.has_value()) + int(f.tree.has_value()) + int(f.path.has_value()) +
                       int(!f.file.empty());
    if (chosen != 1) throw UsageError("choose exactly one of --lattice, --tree, --path, --graph");
    if (f.lattice) return generate_lattice(*f.lattice, f.half_width);
    if (f.tree) return generate_tree(*f.tree, f.depth);
    if (f.path) return generate_path(*f.path);
    std::ifstream in(f.file);
    if (!in) fail(ErrorKind::parse_error, "cannot open graph file '" + f.file + "'");
    return load_graph(in);
}

/// Everything a command needs after the config is resolved.
struct Setup {
    ExperimentConfig config;
    WeightedGraph graph;
    PseudoMetric metric = PseudoMetric::graph_distance();
    VertexId x0 = 0;
};

inline Setup make_setup(const ExperimentConfig& c) {
    Setup s{c, build_graph(c.graph), PseudoMetric::graph_distance(), 0};
    s.metric = build_metric(c, s.graph);
    s.x0 = base_vertex(c, s.graph);
    return s;
}

inline Coupling parse_coupling(const std::string& s) {
    if (s == "coupled") return Coupling::coupled;
    if (s == "uncoupled") return Coupling::uncoupled;
    fail(ErrorKind::parse_error, "unknown coupling '" + s + "'");
}

inline CsvMode parse_csv_mode(const std::string& s) {
    if (s == "full") return CsvMode::full;
    if (s == "summary") return CsvMode::summary;
    fail(ErrorKind::parse_error, "unknown csv mode '" + s + "'");
}

/// Radius beyond which a datum is below 1e-12 of its peak.
inline double data_radius(const DataSpec& d) {
    if (d.kind == "zero" || d.kind == "delta") return 0.0;
    if (d.kind == "gaussian") return d.sigma * std::sqrt(2.0 * std::log(1e12));
    return std::numeric_limits<double>::infinity();
}

/// Distance from x0 to the nearest truncation boundary vertex.
inline double truncation_radius(const WeightedGraph& g, std::span<const double> dist) {
    double r = std::numeric_limits<double>::infinity();
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        if (g.is_boundary(x)) r = std::min(r, dist[x]);
    return r;
}

struct SimulationSetup {
    WaveSystemProblem problem;
    std::vector<double> dist;
    std::vector<std::string> warnings;
    double support_radius = 0.0;
};

inline SimulationSetup make_simulation(const Setup& s, double p, double q) {
    const auto& c = s.config;
    const auto& sim = c.simulation;
    SimulationSetup out;
    out.dist = distances_from(s.metric, s.graph, s.x0);
    std::mt19937_64 rng(c.seed);
    auto& prob = out.problem;
    prob.graph = &s.graph;
    prob.metric = s.metric;
    prob.x0 = s.x0;
    prob.h1 = build_potential(c.h1);
    prob.h2 = build_potential(c.h2);
    prob.p = p;
    prob.q = q;
    prob.u0 = build_data(sim.u0, out.dist, rng);
    prob.u1 = build_data(sim.u1, out.dist, rng);
    prob.v0 = build_data(sim.v0, out.dist, rng);
    prob.v1 = build_data(sim.v1, out.dist, rng);
    prob.dt = sim.dt ? *sim.dt : cfl_dt(s.graph, sim.dt_safety);
    prob.T = sim.T;
    prob.blowup_threshold = sim.threshold;
    prob.step_cap = sim.step_cap;
    prob.coupling = parse_coupling(sim.coupling);
    out.support_radius = std::max({data_radius(sim.u0), data_radius(sim.u1), data_radius(sim.v0), data_radius(sim.v1)});
    return out;
}

/// Heuristic light-cone check: truncation radius >= support radius + T * j.
inline void light_cone_warning(const Setup& s, SimulationSetup& sim, double support, std::ostream& err) {
    const double trunc = truncation_radius(s.graph, sim.dist);
    if (!std::isfinite(trunc)) return;
    double speed = 1.0;
    if (s.graph.edge_count() > 0) speed = jump_size(s.metric, s.graph);
    const double needed = support + sim.problem.T * speed;
    if (trunc < needed) {
        std::ostringstream msg;
        msg << "truncation radius " << trunc << " is smaller than support radius + T*j = " << needed
            << "; boundary effects may reach the data";
        sim.warnings.push_back(msg.str());
        err << "warning: " << msg.str() << '\n';
    }
}

inline Json trajectory_summary(const Trajectory& traj, const WeightedGraph& g) {
    return {{"status", traj.blew_up() ? "blowup" : "completed"},
            {"dt", traj.dt},
            {"samples", traj.samples()},
            {"final_time", traj.final_time()},
            {"step_cap_hit", traj.step_cap_hit},
            {"blowup", blowup_json(traj, g)}};
}

inline IntegrationOptions integration(const ExperimentConfig& c) {
    IntegrationOptions o;
    o.points_per_unit = c.points_per_unit;
    return o;
}

inline CriterionVerdict run_criterion(const Setup& s, const std::string& mode, double p, double q) {
    const auto& c = s.config;
    SystemParams params = c.params;
    params.p = p;
    params.q = q;
    const auto grid = effective_r_grid(c);
    const auto h1 = build_potential(c.h1);
    const auto h2 = build_potential(c.h2);
    if (mode == "theorem1") return theorem1_check(s.graph, s.metric, s.x0, params, h1, h2, grid, c.tolerance, integration(c));
    if (mode == "theorem2") return theorem2_check(s.graph, s.metric, s.x0, params, h1, h2, grid, c.tolerance, integration(c));
    if (mode == "theoremA")
        return theoremA_check(s.graph, s.metric, s.x0, p, params.alpha, params.theta1, params.theta2, params.R0, h1,
                              grid, c.tolerance, integration(c));
    fail(ErrorKind::parse_error, "unknown mode '" + mode + "'");
}

class Output {
  public:
    Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) fail(ErrorKind::invalid_argument, "cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

  private:
    std::ofstream file_;
    std::ostream& fallback_;
};

} // namespace cli

/// Runs one command line. Output goes to `out` unless --out is given; the
/// JSON error object of a failed run goes to `out` as well.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace cli;
    CLI::App app{"Blow-up criteria and wave-system experiments on weighted graphs", "wavegraph"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("-o,--out", out_path, "output file");
    app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", seed, "seed for randomized data (overrides config)");

    GraphFlags gen_flags, assume_flags;
    auto* gen = app.add_subcommand("gen", "generate a graph file");
    add_graph_flags(gen, gen_flags, false);

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "check a graph file");
    validate->add_option("file", validate_file, "graph file")->required();

    std::optional<std::string> metric_flag;
    std::string table_flag;
    std::optional<Label> x0_flag;
    std::optional<double> alpha_flag, r0_flag, c2_flag;
    bool include_boundary = false;
    auto* assume = app.add_subcommand("assumptions", "structural hypotheses of a graph and metric");
    add_graph_flags(assume, assume_flags, true);
    assume->add_option("--metric", metric_flag, "graph | l1 | l2 | table");
    assume->add_option("--table", table_flag, "table metric file");
    assume->add_option("--x0", x0_flag, "base vertex label");
    assume->add_option("--alpha", alpha_flag, "decay exponent in [0, 1]");
    assume->add_option("--R0", r0_flag, "inner radius");
    assume->add_option("--C2", c2_flag, "decay constant to test against");
    assume->add_flag("--include-boundary", include_boundary, "scan the truncation boundary layer too");

    std::optional<std::string> mode_flag;
    auto* criterion = app.add_subcommand("criterion", "volume-growth verdict");
    criterion->add_option("--mode", mode_flag, "theorem1 | theorem2 | theoremA");

    std::optional<std::string> csv_flag;
    auto* simulate_cmd = app.add_subcommand("simulate", "integrate the wave system");
    simulate_cmd->add_option("--csv", csv_flag, "full | summary");

    std::optional<double> weak_r;
    std::optional<std::string> equation_flag;
    auto* weak = app.add_subcommand("weakcheck", "weak-form residual along a simulated trajectory");
    weak->add_option("--R", weak_r, "test-function scale");
    weak->add_option("--equation", equation_flag, "u | v");

    std::optional<std::string> family_flag;
    auto* lemma = app.add_subcommand("lemma", "empirical test-function constants");
    lemma->add_option("--family", family_flag, "sec3 | sec4");

    auto* sweep = app.add_subcommand("sweep", "verdict table over (p, q)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    auto load = [&]() -> ExperimentConfig {
        if (config_path.empty()) throw UsageError("--config is required for this command");
        ExperimentConfig c = load_config(config_path);
        if (seed) c.seed = *seed;
        return c;
    };

    try {
        // Stage 1: usage and config. Failures here exit 2.
        std::optional<ExperimentConfig> config;
        try {
            if (!gen->parsed() && !validate->parsed() && !assume->parsed()) config = load();
            else if (!config_path.empty()) config = load();
            if (assume->parsed() && !metric_flag && !config) throw UsageError("--metric is required");
            if (gen->parsed() && !gen_flags.given() && !config) throw UsageError("gen needs a generator flag or --config");
        } catch (const UsageError& e) {
            err << "usage error: " << e.what() << '\n';
            return 2;
        } catch (const Error& e) {
            err << "config error: " << e.what() << '\n';
            out << error_json(std::string(to_string(e.kind())), e.what()).dump(2) << '\n';
            return 2;
        }

        Output sink(out_path, out);

        if (gen->parsed()) {
            WeightedGraph g = gen_flags.given() ? graph_from_flags(gen_flags) : build_graph(config->graph);
            save_graph(g, sink.stream());
            err << "generated " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
            return 0;
        }

        if (validate->parsed()) {
            std::ifstream in(validate_file);
            if (!in) fail(ErrorKind::parse_error, "cannot open graph file '" + validate_file + "'");
            WeightedGraph g = load_graph(in, LoadMode::lenient);
            const auto report = validate_graph(g);
            sink.stream() << to_json(report, g).dump(2) << '\n';
            return report.ok() ? 0 : 1;
        }

        if (assume->parsed()) {
            ExperimentConfig c = config ? *config : ExperimentConfig{};
            if (metric_flag) c.metric = *metric_flag;
            if (!table_flag.empty()) c.metric_table = table_flag;
            if (x0_flag) c.x0 = *x0_flag;
            if (alpha_flag) c.params.alpha = *alpha_flag;
            if (r0_flag) c.params.R0 = *r0_flag;
            WeightedGraph g = assume_flags.given() ? graph_from_flags(assume_flags) : build_graph(c.graph);
            const PseudoMetric m = build_metric(c, g);
            const VertexId x0 = base_vertex(c, g);

            AssumptionOptions opts;
            opts.include_boundary = include_boundary;
            Json calibration = nullptr;
            if (c2_flag) {
                opts.C2_bound = *c2_flag;
            } else {
                // No constant given: calibrate on the inner eighth of the scanned
                // range and test the rest against twice that value.
                const auto dist = distances_from(m, g, x0);
                double reach = 0.0;
                for (double d : dist) reach = std::max(reach, d);
                AssumptionOptions inner = opts;
                inner.max_radius = reach / 8.0;
                const auto probe = assumption_a_report(m, g, x0, c.params.alpha, c.params.R0, inner);
                opts.C2_bound = 2.0 * std::max(probe.C2, 1e-300);
                calibration = {{"inner_radius", reach / 8.0}, {"C2_inner", probe.C2}, {"factor", 2.0}};
            }
            const auto report = assumption_a_report(m, g, x0, c.params.alpha, c.params.R0, opts);
            Json doc;
            doc["metric"] = std::string(to_string(m.kind()));
            doc["x0"] = g.label(x0);
            doc["assumption_a"] = to_json(report, g);
            doc["calibration"] = calibration;
            try {
                doc["alpha_fit"] = to_json(fit_alpha(m, g, x0, c.params.R0));
            } catch (const Error& e) {
                doc["alpha_fit"] = error_json(std::string(to_string(e.kind())), e.what())["error"];
            }
            sink.stream() << doc.dump(2) << '\n';
            return report.ok() ? 0 : 1;
        }

        const Setup s = make_setup(*config);
        const auto& c = s.config;

        if (criterion->parsed()) {
            const std::string mode = mode_flag ? *mode_flag : c.mode;
            const auto verdict = run_criterion(s, mode, c.params.p, c.params.q);
            SystemParams params = c.params;
            if (mode == "theoremA") params.q = params.p;
            Json doc = to_json(verdict, params);
            std::mt19937_64 rng(c.seed);
            const auto dist = distances_from(s.metric, s.graph, s.x0);
            const auto u0 = build_data(c.simulation.u0, dist, rng);
            const auto u1 = build_data(c.simulation.u1, dist, rng);
            const auto v0 = build_data(c.simulation.v0, dist, rng);
            const auto v1 = build_data(c.simulation.v1, dist, rng);
            if (mode == "theorem2") {
                doc["xdelta_norms"] = {{"u0", xdelta_norm(s.graph, s.metric, s.x0, u0, c.params.delta)},
                                       {"u1", xdelta_norm(s.graph, s.metric, s.x0, u1, c.params.delta)},
                                       {"v0", xdelta_norm(s.graph, s.metric, s.x0, v0, c.params.delta)},
                                       {"v1", xdelta_norm(s.graph, s.metric, s.x0, v1, c.params.delta)}};
            } else {
                doc["initial_data"] = to_json(initial_data_conditions(s.graph, s.metric, s.x0, u1, v1,
                                                                      effective_r_grid(c), c.params.theta1));
            }
            sink.stream() << doc.dump(2) << '\n';
            return verdict.satisfied ? 0 : 1;
        }

        if (simulate_cmd->parsed()) {
            auto sim = make_simulation(s, c.params.p, c.params.q);
            light_cone_warning(s, sim, sim.support_radius, err);
            const Trajectory traj = simulate(sim.problem);
            if (!out_path.empty()) {
                write_trajectory_csv(traj, s.graph, sink.stream(), parse_csv_mode(csv_flag ? *csv_flag : c.simulation.csv));
            }
            Json doc = trajectory_summary(traj, s.graph);
            doc["warnings"] = sim.warnings;
            out << doc.dump(2) << '\n';
            return 0;
        }

        if (weak->parsed()) {
            const auto& w = c.weakcheck;
            const double R = weak_r ? *weak_r : w.R;
            const std::string equation = equation_flag ? *equation_flag : w.equation;
            if (equation != "u" && equation != "v") fail(ErrorKind::invalid_argument, "equation must be u or v");
            auto sim = make_simulation(s, c.params.p, c.params.q);

            const double s_power = w.s ? *w.s : double(default_power(c.params.p, c.params.q));
            std::optional<TestFunction> tf;
            double spatial = std::numeric_limits<double>::infinity();
            if (w.family == "sec3") {
                tf = TestFunction::sec3({c.params.theta1, c.params.theta2, R, s_power});
                spatial = std::pow(2.0 * std::pow(R, c.params.theta1), 1.0 / c.params.theta1);
            } else if (w.family == "sec4") {
                const double j = s.graph.edge_count() > 0 ? jump_size(s.metric, s.graph) : 0.0;
                tf = TestFunction::sec4({s_power, R, c.params.alpha, c.params.delta, j});
            } else {
                fail(ErrorKind::invalid_argument, "unknown test-function family '" + w.family + "'");
            }
            if (tf->time_support() > sim.problem.T - sim.problem.dt)
                fail(ErrorKind::truncated_support, "test-function time support " + detail::format_real(tf->time_support()) +
                                                       " does not fit in the horizon T - dt");
            light_cone_warning(s, sim, std::max(sim.support_radius, spatial), err);
            const Trajectory traj = simulate(sim.problem);
            const GraphTestFunction gtf(*tf, s.graph, s.metric, s.x0);
            const bool first = equation == "u";
            const auto report = weak_residual(traj, gtf, first ? sim.problem.h1 : sim.problem.h2,
                                              first ? c.params.p : c.params.q, first ? first_equation : second_equation);
            Json doc = to_json(report);
            doc["equation"] = equation;
            doc["family"] = w.family;
            doc["R"] = R;
            doc["s"] = s_power;
            doc["trajectory"] = trajectory_summary(traj, s.graph);
            doc["warnings"] = sim.warnings;
            sink.stream() << doc.dump(2) << '\n';
            return 0;
        }

        if (lemma->parsed()) {
            const std::string family = family_flag ? *family_flag : c.lemma.family;
            const auto grid = c.lemma.R_grid.empty() ? effective_r_grid(c) : c.lemma.R_grid;
            LemmaOptions opts;
            opts.points_per_unit = c.lemma.points_per_unit;
            Json results = Json::array();
            for (double R : grid) {
                if (family == "sec3")
                    results.push_back(to_json(verify_lemma_sec3(s.graph, s.metric, s.x0, c.params.theta1, c.params.theta2,
                                                                 c.params.alpha, R, opts)));
                else if (family == "sec4")
                    results.push_back(to_json(verify_lemma_sec4(s.graph, s.metric, s.x0, c.lemma.s, c.params.alpha,
                                                                 c.params.delta, R, opts)));
                else
                    fail(ErrorKind::invalid_argument, "unknown lemma family '" + family + "'");
            }
            Json doc{{"family", family}, {"results", results}};
            sink.stream() << doc.dump(2) << '\n';
            return 0;
        }

        if (sweep->parsed()) {
            const auto& sw = c.sweep;
            if (sw.p_values.empty()) fail(ErrorKind::invalid_argument, "sweep.p_values is empty");
            std::vector<std::pair<double, double>> cells;
            if (sw.q_values.empty()) {
                for (double p : sw.p_values) cells.emplace_back(p, p);
            } else {
                for (double p : sw.p_values)
                    for (double q : sw.q_values) cells.emplace_back(p, q);
            }
            std::vector<std::string> rows(cells.size());
            std::atomic<std::size_t> next{0};
            std::mutex error_mutex;
            std::optional<Error> first_error;
            auto worker = [&] {
                for (std::size_t k; (k = next.fetch_add(1)) < cells.size();) {
                    try {
                        const auto [p, q] = cells[k];
                        const auto verdict = run_criterion(s, c.mode, p, q);
                        std::string blowup;
                        if (sw.simulate) {
                            auto sim = make_simulation(s, p, q);
                            const Trajectory traj = simulate(sim.problem);
                            blowup = traj.blew_up() ? detail::format_real(traj.blowup_time) : "none";
                        }
                        rows[k] = detail::format_real(p) + ',' + detail::format_real(q) + ',' +
                                  detail::format_real(verdict.critical_exponent) + ',' +
                                  detail::format_real(verdict.exponent_estimate) + ',' +
                                  (verdict.satisfied ? "satisfied" : "not_satisfied") + ',' + blowup;
                    } catch (const Error& e) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = e;
                    }
                }
            };
            std::vector<std::thread> pool;
            const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
            for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();
            if (first_error) throw *first_error;
            std::ostream& os = sink.stream();
            os << sweep_csv_header << '\n';
            for (const auto& row : rows) os << row << '\n';
            return 0;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        out << error_json(std::string(to_string(e.kind())), e.what()).dump(2) << '\n';
        return 1;
    } catch (const std::exception& e) {
        out << error_json("internal", e.what()).dump(2) << '\n';
        return 1;
    }
    return 2;
}

} // namespace wavegraph
