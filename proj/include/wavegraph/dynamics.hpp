#pragma once

// Explicit leapfrog integration of the coupled semilinear wave system
//   u_tt - Delta u = h1 |v|^p,   v_tt - Delta v = h2 |u|^q
// on a finite weighted graph, with blow-up detection, and evaluation of the
// weak formulation along a computed trajectory.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wavegraph/criterion.hpp"
#include "wavegraph/cutoffs.hpp"
#include "wavegraph/error.hpp"
#include "wavegraph/geometry.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

/// safety * 2 / sqrt(lambda_hat) with lambda_hat = 4 max_x weighted_degree(x),
/// twice the Gershgorin bound on the spectrum of -Delta. Edgeless graphs get 0.1.
inline double cfl_dt(const WeightedGraph& g, double safety = 0.5) {
    if (!(safety > 0.0 && safety <= 1.0)) fail(ErrorKind::invalid_argument, "safety must lie in (0, 1]");
    const double lambda_hat = 4.0 * max_weighted_degree(g);
    if (lambda_hat == 0.0) return 0.1;
    return safety * 2.0 / std::sqrt(lambda_hat);
}

enum class Coupling {
    coupled,   ///< sources h1 |v|^p and h2 |u|^q
    uncoupled, ///< sources h1 |u|^p and h2 |v|^q; no verdict semantics
};

struct WaveSystemProblem {
    const WeightedGraph* graph = nullptr;
    PseudoMetric metric = PseudoMetric::graph_distance();
    VertexId x0 = 0; ///< base point for radial potentials
    Potential h1 = Potential::constant(1.0);
    Potential h2 = Potential::constant(1.0);
    double p = 2.0;
    double q = 2.0;
    VertexFunction u0, u1, v0, v1;
    double dt = 0.01;
    double T = 1.0;
    double blowup_threshold = 1e8;
    std::size_t step_cap = 10'000'000;
    Coupling coupling = Coupling::coupled;
};

enum class TrajectoryStatus { completed, blowup };

struct Trajectory {
    double dt = 0.0;
    std::vector<VertexFunction> u; ///< u[n] sampled at t_n = n dt
    std::vector<VertexFunction> v;
    VertexFunction u1;             ///< initial velocities, kept for the weak form
    VertexFunction v1;
    TrajectoryStatus status = TrajectoryStatus::completed;
    double blowup_time = 0.0;      ///< first t_n with max(|u|, |v|) over threshold
    VertexId blowup_vertex = 0;
    double blowup_threshold = 0.0;
    bool step_cap_hit = false;     ///< horizon not reached because of the step cap

    std::size_t samples() const noexcept { return u.size(); }
    double final_time() const noexcept { return u.empty() ? 0.0 : dt * static_cast<double>(u.size() - 1); }
    bool blew_up() const noexcept { return status == TrajectoryStatus::blowup; }
    std::size_t blowup_step() const { return static_cast<std::size_t>(std::llround(blowup_time / dt)); }
};

namespace detail {

inline void check_data(const WeightedGraph& g, std::span<const double> f, const char* name) {
    if (f.size() != g.vertex_count())
        fail(ErrorKind::domain_mismatch, std::string(name) + " does not match the graph");
}

/// Returns (vertex, value) of max |.| over both fields, or flags a nonfinite entry.
struct SupState {
    double sup = 0.0;
    VertexId where = 0;
    bool finite = true;
};

inline SupState sup_norm(std::span<const double> u, std::span<const double> v) {
    SupState s;
    for (VertexId x = 0; x < u.size(); ++x) {
        for (double val : {u[x], v[x]}) {
            if (!std::isfinite(val)) {
                s.finite = false;
                s.where = x;
                s.sup = std::numeric_limits<double>::infinity();
                return s;
            }
            if (std::abs(val) > s.sup) {
                s.sup = std::abs(val);
                s.where = x;
            }
        }
    }
    return s;
}

} // namespace detail

/// Central differences in time:
///   w^{n+1} = 2 w^n - w^{n-1} + dt^2 (Delta w^n + source^n)
/// with the Taylor start w^1 = w^0 + dt w_t(0) + dt^2/2 (Delta w^0 + source^0).
/// Stops at the first step where max(|u|, |v|) exceeds the threshold or a
/// value is not finite; that sample is not stored.
inline Trajectory simulate(const WaveSystemProblem& prob) {
    if (!prob.graph) fail(ErrorKind::invalid_argument, "problem has no graph");
    const WeightedGraph& g = *prob.graph;
    const std::size_t n = g.vertex_count();
    detail::check_data(g, prob.u0, "u0");
    detail::check_data(g, prob.u1, "u1");
    detail::check_data(g, prob.v0, "v0");
    detail::check_data(g, prob.v1, "v1");
    if (!(prob.p > 1.0 && prob.q > 1.0)) fail(ErrorKind::invalid_argument, "p and q must exceed 1");
    if (!(prob.dt > 0.0) || !(prob.T > 0.0)) fail(ErrorKind::invalid_argument, "dt and T must be positive");
    if (!(prob.blowup_threshold > 0.0)) fail(ErrorKind::invalid_argument, "blow-up threshold must be positive");
    if (g.edge_count() > 0 && prob.dt > cfl_dt(g, 1.0))
        fail(ErrorKind::stability, "dt exceeds the leapfrog stability bound " + std::to_string(cfl_dt(g, 1.0)));

    const bool radial = prob.h1.form() == PotentialForm::radial_temporal ||
                        prob.h2.form() == PotentialForm::radial_temporal;
    const std::vector<double> dist = radial ? distances_from(prob.metric, g, prob.x0) : std::vector<double>(n, 0.0);
    const bool h_static = prob.h1.time_independent() && prob.h2.time_independent();
    std::vector<double> h1v(n), h2v(n);
    auto refresh_potentials = [&](double t) {
        for (VertexId x = 0; x < n; ++x) {
            h1v[x] = prob.h1.at(x, dist[x], t);
            h2v[x] = prob.h2.at(x, dist[x], t);
        }
    };
    refresh_potentials(0.0);

    const bool coupled = prob.coupling == Coupling::coupled;
    std::vector<double> lap_u(n), lap_v(n);
    // acceleration a = Delta w + source at the current level
    auto accelerations = [&](std::span<const double> u, std::span<const double> v, std::span<double> au,
                             std::span<double> av) {
        laplacian_apply(g, u, lap_u);
        laplacian_apply(g, v, lap_v);
        for (VertexId x = 0; x < n; ++x) {
            const double su = coupled ? v[x] : u[x];
            const double sv = coupled ? u[x] : v[x];
            au[x] = lap_u[x] + h1v[x] * std::pow(std::abs(su), prob.p);
            av[x] = lap_v[x] + h2v[x] * std::pow(std::abs(sv), prob.q);
        }
    };

    Trajectory traj;
    traj.dt = prob.dt;
    traj.u1 = prob.u1;
    traj.v1 = prob.v1;
    traj.blowup_threshold = prob.blowup_threshold;

    auto over = [&](std::span<const double> u, std::span<const double> v, std::size_t step) {
        const auto s = detail::sup_norm(u, v);
        if (s.finite && s.sup <= prob.blowup_threshold) return false;
        traj.status = TrajectoryStatus::blowup;
        traj.blowup_time = static_cast<double>(step) * prob.dt;
        traj.blowup_vertex = s.where;
        return true;
    };

    auto steps = static_cast<std::size_t>(std::floor(prob.T / prob.dt + 1e-9));
    if (steps > prob.step_cap) {
        steps = prob.step_cap;
        traj.step_cap_hit = true;
    }

    if (over(prob.u0, prob.v0, 0)) return traj;
    traj.u.push_back(prob.u0);
    traj.v.push_back(prob.v0);
    if (steps == 0) return traj;

    std::vector<double> au(n), av(n);
    accelerations(prob.u0, prob.v0, au, av);
    const double dt2 = prob.dt * prob.dt;
    VertexFunction u_next(n), v_next(n);
    for (VertexId x = 0; x < n; ++x) {
        u_next[x] = prob.u0[x] + prob.dt * prob.u1[x] + 0.5 * dt2 * au[x];
        v_next[x] = prob.v0[x] + prob.dt * prob.v1[x] + 0.5 * dt2 * av[x];
    }
    if (over(u_next, v_next, 1)) return traj;
    traj.u.push_back(u_next);
    traj.v.push_back(v_next);

    for (std::size_t k = 1; k < steps; ++k) {
        if (!h_static) refresh_potentials(static_cast<double>(k) * prob.dt);
        const VertexFunction& uc = traj.u[k];
        const VertexFunction& vc = traj.v[k];
        const VertexFunction& up = traj.u[k - 1];
        const VertexFunction& vp = traj.v[k - 1];
        accelerations(uc, vc, au, av);
        for (VertexId x = 0; x < n; ++x) {
            u_next[x] = 2.0 * uc[x] - up[x] + dt2 * au[x];
            v_next[x] = 2.0 * vc[x] - vp[x] + dt2 * av[x];
        }
        if (over(u_next, v_next, k + 1)) return traj;
        traj.u.push_back(u_next);
        traj.v.push_back(v_next);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Weak formulation

enum class Field { u, v };

/// Which field is tested and which one feeds the nonlinear source.
struct WeakSelector {
    Field tested = Field::u;
    Field source = Field::v;
};

inline constexpr WeakSelector first_equation{Field::u, Field::v};  ///< with h1, p
inline constexpr WeakSelector second_equation{Field::v, Field::u}; ///< with h2, q

struct WeakFormReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0; ///< lhs - rhs
    // Signed contributions; their sum is lhs.
    double dtt_term = 0.0;       ///< + int sum w phi_tt mu
    double laplacian_term = 0.0; ///< - int sum (Delta w) phi mu
    double u0_term = 0.0;        ///< + sum w(0) phi_t(., 0) mu
    double u1_term = 0.0;        ///< - sum w_t(0) phi(., 0) mu
    double dt = 0.0;
    double time_support = 0.0;
};

/// Time integrals on the trajectory's grid with analytic test-function values.
/// The Laplacian and source terms use the trapezoid rule. The phi_tt term is
/// integrated exactly against the piecewise-linear interpolant of w, which
/// after integrating by parts on every step reduces to
///   -sum w(0) phi_t(., 0) mu - sum_k sum_x (w^{k+1} - w^k)(phi^{k+1} - phi^k) mu / dt.
/// phi_tt of the cut-offs has kinks, and plain trapezoid on w phi_tt picks up
/// an O(dt^2) error whose constant jumps with the grid phase of the kink.
/// The test function must vanish from T - dt on.
inline WeakFormReport weak_residual(const Trajectory& traj, const GraphTestFunction& tf, const Potential& h,
                                    double exponent, WeakSelector selector) {
    const WeightedGraph& g = tf.graph();
    const std::size_t n = g.vertex_count();
    if (traj.samples() == 0) fail(ErrorKind::invalid_argument, "empty trajectory");
    if (traj.u.front().size() != n) fail(ErrorKind::domain_mismatch, "trajectory does not match the graph");
    const double support = tf.function().time_support();
    if (traj.blew_up() && traj.blowup_time < support)
        fail(ErrorKind::truncated_support, "trajectory blew up before the end of the test-function support");
    if (support > traj.final_time() - traj.dt + 1e-12)
        fail(ErrorKind::support_violation, "test-function support exceeds the trajectory horizon minus one step");

    const auto& field = selector.tested == Field::u ? traj.u : traj.v;
    const auto& source = selector.source == Field::u ? traj.u : traj.v;
    const auto& velocity = selector.tested == Field::u ? traj.u1 : traj.v1;
    const auto dist = tf.distances();

    WeakFormReport rep;
    rep.dt = traj.dt;
    rep.time_support = support;

    std::vector<double> lap(n), phi_prev(n), phi_cur(n);
    for (VertexId x = 0; x < n; ++x) {
        const TimeJet jet = tf.at(x, 0.0);
        phi_prev[x] = jet.value;
        rep.u0_term += field[0][x] * jet.dt * g.mu(x);
        rep.u1_term -= velocity[x] * jet.value * g.mu(x);
        rep.dtt_term -= field[0][x] * jet.dt * g.mu(x);
    }
    const auto last = static_cast<std::size_t>(std::ceil(support / traj.dt)) + 1;
    const std::size_t end = std::min(last, traj.samples() - 1);
    for (std::size_t k = 0; k <= end; ++k) {
        const double t = static_cast<double>(k) * traj.dt;
        const double w = (k == 0 || k == traj.samples() - 1) ? 0.5 * traj.dt : traj.dt;
        laplacian_apply(g, field[k], lap);
        double dtt = 0.0, lap_term = 0.0, rhs = 0.0;
        for (VertexId x = 0; x < n; ++x) {
            const double mu = g.mu(x);
            const double phi = tf.at(x, t).value;
            phi_cur[x] = phi;
            if (k > 0) dtt += (field[k][x] - field[k - 1][x]) * (phi - phi_prev[x]) * mu;
            if (phi == 0.0) continue;
            lap_term += lap[x] * phi * mu;
            rhs += h.at(x, dist[x], t) * std::pow(std::abs(source[k][x]), exponent) * phi * mu;
        }
        std::swap(phi_prev, phi_cur);
        rep.dtt_term -= dtt / traj.dt;
        rep.laplacian_term -= w * lap_term;
        rep.rhs += w * rhs;
    }
    rep.lhs = rep.dtt_term + rep.laplacian_term + rep.u0_term + rep.u1_term;
    rep.residual = rep.lhs - rep.rhs;
    return rep;
}

/// Discrete wave energy of the u field between steps n-1 and n:
/// sum mu ((u^n - u^{n-1})/dt)^2 / 2 plus the average over both steps of
/// (1/4) sum_x sum_{y~x} omega_xy (u(y) - u(x))^2.
inline double energy_diagnostic(const Trajectory& traj, const WeightedGraph& g, std::size_t step) {
    if (step < 1 || step >= traj.samples()) fail(ErrorKind::invalid_argument, "energy step index out of range");
    const auto& cur = traj.u[step];
    const auto& prev = traj.u[step - 1];
    auto dirichlet = [&](const VertexFunction& f) {
        double acc = 0.0;
        for (VertexId x = 0; x < g.vertex_count(); ++x) {
            const auto nbr = g.neighbors(x);
            const auto w = g.weights(x);
            for (std::size_t k = 0; k < nbr.size(); ++k) {
                const double diff = f[nbr[k]] - f[x];
                acc += w[k] * diff * diff;
            }
        }
        return 0.25 * acc;
    };
    double kinetic = 0.0;
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        const double vel = (cur[x] - prev[x]) / traj.dt;
        kinetic += 0.5 * g.mu(x) * vel * vel;
    }
    return kinetic + 0.5 * (dirichlet(prev) + dirichlet(cur));
}

// ---------------------------------------------------------------------------
// Export

enum class CsvMode { full, summary };

inline void write_trajectory_csv(const Trajectory& traj, const WeightedGraph& g, std::ostream& out,
                                 CsvMode mode = CsvMode::full) {
    out.precision(17);
    if (mode == CsvMode::full) {
        out << "t,vertex,u,v\n";
        for (std::size_t k = 0; k < traj.samples(); ++k) {
            const double t = static_cast<double>(k) * traj.dt;
            for (VertexId x = 0; x < g.vertex_count(); ++x)
                out << t << ',' << g.label(x) << ',' << traj.u[k][x] << ',' << traj.v[k][x] << '\n';
        }
        return;
    }
    out << "t,sup_u,sup_v\n";
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        double su = 0.0, sv = 0.0;
        for (VertexId x = 0; x < g.vertex_count(); ++x) {
            su = std::max(su, std::abs(traj.u[k][x]));
            sv = std::max(sv, std::abs(traj.v[k][x]));
        }
        out << static_cast<double>(k) * traj.dt << ',' << su << ',' << sv << '\n';
    }
}

} // namespace wavegraph
