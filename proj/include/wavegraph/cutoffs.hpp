#pragma once

// C^2 cut-off profiles, the two space-time test-function families, the
// regions E_R / F_R / Q_R, and empirical measurement of the constants in
// the derivative bounds the test-function method relies on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wavegraph/error.hpp"
#include "wavegraph/geometry.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

/// Value and first two derivatives of a scalar profile.
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Quintic smoothstep S(t) = 6t^5 - 15t^4 + 10t^3 on [0, 1], clamped outside.
// S, S' and S'' vanish at 0; S = 1 and S' = S'' = 0 at 1.
inline double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}
inline double smoothstep_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return 30.0 * u * u;
}
inline double smoothstep_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}
inline Jet smoothstep_jet(double t) { return {smoothstep(t), smoothstep_d1(t), smoothstep_d2(t)}; }

/// 1 on [0, 1], 1 - S(r - 1) on (1, 2), 0 on [2, inf).
inline Jet phi(double r) {
    if (r <= 1.0) return {1.0, 0.0, 0.0};
    if (r >= 2.0) return {0.0, 0.0, 0.0};
    const Jet s = smoothstep_jet(r - 1.0);
    return {1.0 - s.value, -s.d1, -s.d2};
}

/// Time profile of the weighted-space family; same shape as phi.
inline Jet eta(double r) { return phi(r); }

/// psi(r) = exp(-delta g(r)) with g = 0 on [-j, 1], g(r) = r S(r - 1) on
/// (1, 2) and g(r) = r on [2, inf). Positive, nonincreasing and C^2.
inline Jet psi(double r, double delta, double jump) {
    if (!(delta > 0.0)) fail(ErrorKind::invalid_argument, "psi: delta must be positive");
    if (r < -jump) fail(ErrorKind::invalid_argument, "psi: argument below -j");
    if (r <= 1.0) return {1.0, 0.0, 0.0};
    double g = r, g1 = 1.0, g2 = 0.0;
    if (r < 2.0) {
        const Jet s = smoothstep_jet(r - 1.0);
        g = r * s.value;
        g1 = s.value + r * s.d1;
        g2 = 2.0 * s.d1 + r * s.d2;
    }
    const double value = std::exp(-delta * g);
    return {value, -delta * g1 * value, (delta * delta * g1 * g1 - delta * g2) * value};
}

// ---------------------------------------------------------------------------
// Space-time regions

enum class RegionKind { E, F, Q };

struct TimeInterval {
    double lo;
    double hi;
};

/// E_R: R^th1 <= d^th1 + t^th2 <= 2 R^th1.
/// F_R: (R/2)^th1 <= d^th1 + t^th2 <= (4R)^th1.
/// Q_R: every vertex, t in [R^((1+a)/2), 2 R^((1+a)/2)].
class SpaceTimeRegion {
public:
    static SpaceTimeRegion E(double R, double theta1, double theta2) {
        return SpaceTimeRegion(RegionKind::E, R, theta1, theta2, 0.0);
    }
    static SpaceTimeRegion F(double R, double theta1, double theta2) {
        return SpaceTimeRegion(RegionKind::F, R, theta1, theta2, 0.0);
    }
    static SpaceTimeRegion Q(double R, double alpha) { return SpaceTimeRegion(RegionKind::Q, R, 2.0, 2.0, alpha); }

    RegionKind kind() const noexcept { return kind_; }
    double R() const noexcept { return R_; }
    double theta1() const noexcept { return theta1_; }
    double theta2() const noexcept { return theta2_; }
    double alpha() const noexcept { return alpha_; }

    /// Bounds on d^th1 + t^th2 (E, F only).
    double lower_level() const {
        return kind_ == RegionKind::E ? std::pow(R_, theta1_) : std::pow(R_ / 2.0, theta1_);
    }
    double upper_level() const {
        return kind_ == RegionKind::E ? 2.0 * std::pow(R_, theta1_) : std::pow(4.0 * R_, theta1_);
    }

    bool contains(double d, double t) const {
        if (kind_ == RegionKind::Q) {
            const double base = std::pow(R_, (1.0 + alpha_) / 2.0);
            return t >= base && t <= 2.0 * base;
        }
        const double level = std::pow(d, theta1_) + std::pow(t, theta2_);
        return level >= lower_level() && level <= upper_level();
    }

    std::optional<TimeInterval> time_interval(double d) const {
        if (kind_ == RegionKind::Q) {
            const double base = std::pow(R_, (1.0 + alpha_) / 2.0);
            return TimeInterval{base, 2.0 * base};
        }
        const double space = std::pow(d, theta1_);
        if (space > upper_level()) return std::nullopt;
        return TimeInterval{std::pow(std::max(0.0, lower_level() - space), 1.0 / theta2_),
                            std::pow(upper_level() - space, 1.0 / theta2_)};
    }

    /// Largest d(x, x0) with a nonempty time slice; infinite for Q_R.
    double shadow_radius() const {
        if (kind_ == RegionKind::Q) return std::numeric_limits<double>::infinity();
        return std::pow(upper_level(), 1.0 / theta1_);
    }

private:
    SpaceTimeRegion(RegionKind kind, double R, double theta1, double theta2, double alpha)
        : kind_(kind), R_(R), theta1_(theta1), theta2_(theta2), alpha_(alpha) {
        if (!(R > 0.0)) fail(ErrorKind::invalid_argument, "region radius must be positive");
        if (!(theta1 > 0.0 && theta2 > 0.0)) fail(ErrorKind::invalid_argument, "region exponents must be positive");
    }

    RegionKind kind_;
    double R_, theta1_, theta2_, alpha_;
};

// ---------------------------------------------------------------------------
// Test functions

enum class TestFamily { sec3, sec4 };

struct Sec3Params {
    double theta1 = 2.0;
    double theta2 = 2.0;
    double R = 1.0;
    double s = 1.0;
};

struct Sec4Params {
    double s = 3.0;
    double R = 1.0;
    double alpha = 1.0;
    double delta = 1.0;
    double jump = 1.0;
};

/// Value and time derivatives of a test function at one space-time point.
struct TimeJet {
    double value = 0.0;
    double dt = 0.0;
    double dtt = 0.0;
};

/// Space-time cut-off depending on x only through d(x, x0):
///   sec3: phi((t^th2 + d^th1) / R^th1)^s
///   sec4: eta(t / R^((1+a)/2))^s * psi((d - j) / R)
class TestFunction {
public:
    static TestFunction sec3(const Sec3Params& p) {
        if (!(p.theta1 >= 2.0 && p.theta2 >= 2.0)) fail(ErrorKind::invalid_argument, "sec3: theta1, theta2 must be >= 2");
        if (!(p.R > 0.0)) fail(ErrorKind::invalid_argument, "sec3: R must be positive");
        if (!(p.s >= 1.0)) fail(ErrorKind::invalid_argument, "sec3: s must be >= 1");
        TestFunction tf;
        tf.family_ = TestFamily::sec3;
        tf.sec3_ = p;
        return tf;
    }
    static TestFunction sec4(const Sec4Params& p) {
        if (!(p.s >= 1.0)) fail(ErrorKind::invalid_argument, "sec4: s must be >= 1");
        if (!(p.R > 0.0)) fail(ErrorKind::invalid_argument, "sec4: R must be positive");
        if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) fail(ErrorKind::invalid_argument, "sec4: alpha must lie in [0, 1]");
        if (!(p.delta > 0.0)) fail(ErrorKind::invalid_argument, "sec4: delta must be positive");
        if (!(p.jump >= 0.0)) fail(ErrorKind::invalid_argument, "sec4: jump must be nonnegative");
        TestFunction tf;
        tf.family_ = TestFamily::sec4;
        tf.sec4_ = p;
        return tf;
    }

    TestFamily family() const noexcept { return family_; }
    const Sec3Params& sec3_params() const noexcept { return sec3_; }
    const Sec4Params& sec4_params() const noexcept { return sec4_; }
    double power() const noexcept { return family_ == TestFamily::sec3 ? sec3_.s : sec4_.s; }

    /// Supremum of the time support.
    double time_support() const {
        if (family_ == TestFamily::sec3)
            return std::pow(2.0 * std::pow(sec3_.R, sec3_.theta1), 1.0 / sec3_.theta2);
        return 2.0 * time_scale();
    }

    /// R^((1+a)/2) for sec4.
    double time_scale() const { return std::pow(sec4_.R, (1.0 + sec4_.alpha) / 2.0); }

    /// sec4 only: eta^s(t / R^((1+a)/2)) with its time derivatives.
    TimeJet time_factor(double t) const {
        if (family_ != TestFamily::sec4) fail(ErrorKind::invalid_argument, "time_factor is defined for sec4 only");
        const double scale = time_scale();
        const Jet e = eta(t / scale);
        return raise(e.value, e.d1 / scale, e.d2 / (scale * scale), sec4_.s);
    }

    /// Evaluate at a vertex at distance d from the base point.
    TimeJet at(double d, double t) const {
        if (t < 0.0) fail(ErrorKind::invalid_argument, "test function evaluated at negative time");
        return family_ == TestFamily::sec3 ? eval_sec3(d, t) : eval_sec4(d, t);
    }

private:
    TestFunction() = default;

    // v = f^s; v_t = s f^(s-1) f_t; v_tt = s(s-1) f^(s-2) f_t^2 + s f^(s-1) f_tt.
    static TimeJet raise(double f, double ft, double ftt, double s) {
        if (f <= 0.0) return {0.0, 0.0, 0.0};
        if (s == 1.0) return {f, ft, ftt};
        const double fs1 = std::pow(f, s - 1.0);
        return {fs1 * f, s * fs1 * ft, s * (s - 1.0) * std::pow(f, s - 2.0) * ft * ft + s * fs1 * ftt};
    }

    TimeJet eval_sec3(double d, double t) const {
        const double scale = std::pow(sec3_.R, sec3_.theta1);
        const double th2 = sec3_.theta2;
        const double arg = (std::pow(t, th2) + std::pow(d, sec3_.theta1)) / scale;
        const double arg_t = th2 * std::pow(t, th2 - 1.0) / scale;
        const double arg_tt = th2 * (th2 - 1.0) * std::pow(t, th2 - 2.0) / scale;
        const Jet f = phi(arg);
        return raise(f.value, f.d1 * arg_t, f.d2 * arg_t * arg_t + f.d1 * arg_tt, sec3_.s);
    }

    TimeJet eval_sec4(double d, double t) const {
        const TimeJet et = time_factor(t);
        const double space = psi((d - sec4_.jump) / sec4_.R, sec4_.delta, sec4_.jump).value;
        return {et.value * space, et.dt * space, et.dtt * space};
    }

    TestFamily family_ = TestFamily::sec3;
    Sec3Params sec3_{};
    Sec4Params sec4_{};
};

/// A test function bound to a graph, a metric and a base point; caches
/// d(., x0) so evaluations are array lookups plus profile arithmetic.
class GraphTestFunction {
public:
    GraphTestFunction(TestFunction tf, const WeightedGraph& g, const PseudoMetric& m, VertexId x0)
        : tf_(tf), graph_(&g), x0_(x0), dist_(distances_from(m, g, x0)) {}

    const TestFunction& function() const noexcept { return tf_; }
    const WeightedGraph& graph() const noexcept { return *graph_; }
    VertexId base_point() const noexcept { return x0_; }
    std::span<const double> distances() const noexcept { return dist_; }

    TimeJet at(VertexId x, double t) const {
        graph_->check_vertex(x);
        return tf_.at(dist_[x], t);
    }

    /// Values of the test function at time t on every vertex.
    void values(double t, std::span<double> out) const {
        if (out.size() != dist_.size()) fail(ErrorKind::domain_mismatch, "output size does not match graph");
        for (VertexId x = 0; x < dist_.size(); ++x) out[x] = tf_.at(dist_[x], t).value;
    }

    /// Graph Laplacian of the test function at (x, t).
    double laplacian(VertexId x, double t) const {
        const auto nbr = graph_->neighbors(x);
        const auto w = graph_->weights(x);
        const double fx = tf_.at(dist_[x], t).value;
        double acc = 0.0;
        for (std::size_t k = 0; k < nbr.size(); ++k) acc += w[k] * (tf_.at(dist_[nbr[k]], t).value - fx);
        return acc / graph_->mu(x);
    }

private:
    TestFunction tf_;
    const WeightedGraph* graph_;
    VertexId x0_;
    std::vector<double> dist_;
};

inline TimeJet testfun_eval(const TestFunction& tf, const WeightedGraph& g, const PseudoMetric& m, VertexId x0,
                            VertexId x, double t) {
    return tf.at(distance(m, g, x0, x), t);
}

/// Smallest integer s >= 1 with p (q (s - 2) - 2) > s.
inline int default_power(double p, double q) {
    if (!(p > 1.0 && q > 1.0)) fail(ErrorKind::invalid_argument, "default_power: p, q must exceed 1");
    int s = 1;
    while (!(p * (q * (s - 2.0) - 2.0) > s)) ++s;
    return s;
}

// ---------------------------------------------------------------------------
// Lemma constant measurement

struct LemmaOptions {
    double points_per_unit = 16.0; ///< time samples per unit of the scanned time extent
};

struct Sec3LemmaResult {
    double R = 0.0;
    // Signed (one-sided) constants: sup of R^k (-quantity)+ over the region.
    double C_lap = 0.0; ///< R^(1+a) (-Delta phi_R)+ over F_R
    double C_dt = 0.0;  ///< R^(th1/th2) (-(phi_R)_t)+ over E_R
    double C_dtt = 0.0; ///< R^(2 th1/th2) (-(phi_R)_tt)+ over E_R
    // Same scalings with absolute values.
    double C_lap_abs = 0.0;
    double C_dt_abs = 0.0;
    double C_dtt_abs = 0.0;
    // Unscaled positive parts at samples outside the respective region.
    double outside_lap = 0.0;
    double outside_dt = 0.0;
    double outside_dtt = 0.0;
    double outside_violation = 0.0; ///< max of the three
    double grid_resolution = 0.0;
    std::size_t time_samples = 0;
};

namespace detail {

/// Boundary-layer vertices with d(x, x0) <= radius, if any.
inline bool layer_meets_ball(const PseudoMetric& m, const WeightedGraph& g, std::span<const double> dist,
                             double radius) {
    if (!g.has_boundary()) return false;
    const auto layer = boundary_layer(m, g, jump_size(m, g));
    for (VertexId x = 0; x < dist.size(); ++x)
        if (layer[x] && dist[x] <= radius) return true;
    return false;
}

inline std::vector<double> uniform_grid(double extent, double points_per_unit) {
    if (!(points_per_unit > 0.0)) fail(ErrorKind::invalid_argument, "points_per_unit must be positive");
    const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(points_per_unit * extent)));
    std::vector<double> grid(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) grid[k] = extent * static_cast<double>(k) / intervals;
    return grid;
}

} // namespace detail

/// Scans every vertex and a uniform time grid over [0, (4 R^th1)^(1/th2)]
/// for phi_R (s = 1). Vertices whose closed neighbourhood lies where phi_R
/// vanishes identically contribute exact zeros and are skipped.
inline Sec3LemmaResult verify_lemma_sec3(const WeightedGraph& g, const PseudoMetric& m, VertexId x0, double theta1,
                                         double theta2, double alpha, double R, const LemmaOptions& opts = {}) {
    if (!(theta1 >= 2.0 && theta2 >= 2.0)) fail(ErrorKind::invalid_argument, "theta1, theta2 must be >= 2");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in [0, 1]");
    if (2.0 * theta1 / theta2 < 1.0 + alpha) fail(ErrorKind::invalid_argument, "need 2 theta1 / theta2 >= 1 + alpha");

    const TestFunction tf = TestFunction::sec3({theta1, theta2, R, 1.0});
    const auto F = SpaceTimeRegion::F(R, theta1, theta2);
    const auto E = SpaceTimeRegion::E(R, theta1, theta2);
    const auto dist = distances_from(m, g, x0);
    if (detail::layer_meets_ball(m, g, dist, F.shadow_radius()))
        fail(ErrorKind::truncation_too_small, "F_R reaches the truncation boundary layer");

    const std::size_t n = g.vertex_count();
    const double dead_level = 2.0 * std::pow(R, theta1);
    std::vector<VertexId> live, active;
    for (VertexId x = 0; x < n; ++x) {
        const bool x_live = std::pow(dist[x], theta1) < dead_level;
        if (x_live) live.push_back(x);
        bool touches = x_live;
        for (VertexId y : g.neighbors(x)) touches = touches || std::pow(dist[y], theta1) < dead_level;
        if (touches) active.push_back(x);
    }

    Sec3LemmaResult res;
    res.R = R;
    const double extent = std::pow(4.0 * std::pow(R, theta1), 1.0 / theta2);
    const auto grid = detail::uniform_grid(extent, opts.points_per_unit);
    res.time_samples = grid.size();
    res.grid_resolution = grid.size() > 1 ? grid[1] - grid[0] : extent;

    const double lap_scale = std::pow(R, 1.0 + alpha);
    const double dt_scale = std::pow(R, theta1 / theta2);
    const double dtt_scale = dt_scale * dt_scale;

    std::vector<double> value(n, 0.0);
    std::vector<TimeJet> jets(n);
    for (double t : grid) {
        if (std::pow(t, theta2) >= dead_level) continue; // phi_R and all derivatives vanish
        for (VertexId x : live) {
            jets[x] = tf.at(dist[x], t);
            value[x] = jets[x].value;
        }
        for (VertexId x : active) {
            const auto nbr = g.neighbors(x);
            const auto w = g.weights(x);
            double acc = 0.0;
            for (std::size_t k = 0; k < nbr.size(); ++k) acc += w[k] * (value[nbr[k]] - value[x]);
            const double lap = acc / g.mu(x);
            // Vertices outside `live` keep the zero jet they were initialised with.
            const double dt = jets[x].dt;
            const double dtt = jets[x].dtt;

            if (F.contains(dist[x], t)) {
                res.C_lap = std::max(res.C_lap, lap_scale * std::max(-lap, 0.0));
                res.C_lap_abs = std::max(res.C_lap_abs, lap_scale * std::abs(lap));
            } else {
                res.outside_lap = std::max(res.outside_lap, std::max(-lap, 0.0));
            }
            if (E.contains(dist[x], t)) {
                res.C_dt = std::max(res.C_dt, dt_scale * std::max(-dt, 0.0));
                res.C_dt_abs = std::max(res.C_dt_abs, dt_scale * std::abs(dt));
                res.C_dtt = std::max(res.C_dtt, dtt_scale * std::max(-dtt, 0.0));
                res.C_dtt_abs = std::max(res.C_dtt_abs, dtt_scale * std::abs(dtt));
            } else {
                res.outside_dt = std::max(res.outside_dt, std::max(-dt, 0.0));
                res.outside_dtt = std::max(res.outside_dtt, std::max(-dtt, 0.0));
            }
        }
    }
    res.outside_violation = std::max({res.outside_lap, res.outside_dt, res.outside_dtt});
    return res;
}

struct Sec4LemmaResult {
    double R = 0.0;
    // |(phi_R)_t| R^((1+a)/2) / (eta^(s-1) e^(-delta d/R)) over Q_R.
    double C_dt = 0.0;
    // |(phi_R)_tt| R^(1+a) / (eta^(s-2) e^(-delta d/R)) over Q_R.
    double C_dtt = 0.0;
    // |Delta phi_R| R^(1+a) / (eta^s e^(-delta d/R)) over (V \ B_R(x0)) x [0, 2 R^((1+a)/2)].
    double C_lap = 0.0;
    // One-sided variants with (-quantity)+ in place of |quantity|.
    double C_dt_signed = 0.0;
    double C_dtt_signed = 0.0;
    double C_lap_signed = 0.0;
    bool time_support_ok = true;      ///< (phi_R)_t == 0 off the Q_R time band
    bool plateau_laplacian_ok = true; ///< Delta phi_R == 0 where psi is flat on the closed neighbourhood
    bool initial_velocity_ok = true;  ///< (phi_R)_t(x, 0) == 0 everywhere
    bool support_check = true;
    double grid_resolution = 0.0;
    std::size_t time_samples = 0;
};

/// Scans every interior vertex and a uniform time grid over
/// [0, 2.5 R^((1+a)/2)], which extends past the Q_R band so the support
/// claims are exercised on both sides of it.
inline Sec4LemmaResult verify_lemma_sec4(const WeightedGraph& g, const PseudoMetric& m, VertexId x0, double s,
                                         double alpha, double delta, double R, const LemmaOptions& opts = {}) {
    if (!(s > 2.0)) fail(ErrorKind::invalid_argument, "sec4 lemma needs s > 2");
    const double jump = g.edge_count() > 0 ? jump_size(m, g) : 0.0;
    const TestFunction tf = TestFunction::sec4({s, R, alpha, delta, jump});
    const auto dist = distances_from(m, g, x0);
    if (detail::layer_meets_ball(m, g, dist, 2.0 * R + jump))
        fail(ErrorKind::truncation_too_small, "B_2R(x0) reaches the truncation boundary layer");

    const std::size_t n = g.vertex_count();
    const std::vector<bool> layer =
        g.has_boundary() ? boundary_layer(m, g, jump) : std::vector<bool>(n, false);

    // Spatial factor psi((d - j)/R) and its graph Laplacian; Delta acts on x only,
    // so Delta phi_R(x, t) = eta^s(t / scale) * Delta psi_R(x).
    std::vector<double> space(n), space_lap(n), envelope(n);
    std::vector<bool> flat(n);
    for (VertexId x = 0; x < n; ++x) {
        space[x] = psi((dist[x] - jump) / R, delta, jump).value;
        envelope[x] = std::exp(-delta * dist[x] / R);
    }
    laplacian_apply(g, space, space_lap);
    for (VertexId x = 0; x < n; ++x) {
        bool f = (dist[x] - jump) / R <= 1.0;
        for (VertexId y : g.neighbors(x)) f = f && (dist[y] - jump) / R <= 1.0;
        flat[x] = f;
    }

    Sec4LemmaResult res;
    res.R = R;
    const double scale = tf.time_scale();
    const auto grid = detail::uniform_grid(2.5 * scale, opts.points_per_unit);
    res.time_samples = grid.size();
    res.grid_resolution = grid[1] - grid[0];
    const double lap_scale = std::pow(R, 1.0 + alpha);

    for (VertexId x = 0; x < n; ++x) {
        if (flat[x] && space_lap[x] != 0.0) res.plateau_laplacian_ok = false;
        if (tf.at(dist[x], 0.0).dt != 0.0) res.initial_velocity_ok = false;
    }

    for (double t : grid) {
        const Jet e = eta(t / scale);
        const double eta_s = std::pow(e.value, s);
        const double eta_s1 = std::pow(e.value, s - 1.0);
        const double eta_s2 = std::pow(e.value, s - 2.0);
        const bool in_band = t >= scale && t <= 2.0 * scale;
        const TimeJet time = tf.time_factor(t);
        for (VertexId x = 0; x < n; ++x) {
            const TimeJet jet{time.value * space[x], time.dt * space[x], time.dtt * space[x]};
            if (!in_band) {
                if (jet.dt != 0.0) res.time_support_ok = false;
            } else {
                if (eta_s1 > 0.0) {
                    const double k = scale / (eta_s1 * envelope[x]);
                    res.C_dt = std::max(res.C_dt, std::abs(jet.dt) * k);
                    res.C_dt_signed = std::max(res.C_dt_signed, std::max(-jet.dt, 0.0) * k);
                }
                if (eta_s2 > 0.0) {
                    const double k = scale * scale / (eta_s2 * envelope[x]);
                    res.C_dtt = std::max(res.C_dtt, std::abs(jet.dtt) * k);
                    res.C_dtt_signed = std::max(res.C_dtt_signed, std::max(-jet.dtt, 0.0) * k);
                }
            }
            if (t <= 2.0 * scale && dist[x] > R && !layer[x] && eta_s > 0.0) {
                const double lap = eta_s * space_lap[x];
                const double k = lap_scale / (eta_s * envelope[x]);
                res.C_lap = std::max(res.C_lap, std::abs(lap) * k);
                res.C_lap_signed = std::max(res.C_lap_signed, std::max(-lap, 0.0) * k);
            }
        }
    }
    res.support_check = res.time_support_ok && res.plateau_laplacian_ok && res.initial_velocity_ok;
    return res;
}

} // namespace wavegraph
