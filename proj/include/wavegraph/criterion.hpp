#pragma once

// Volume-growth nonexistence criteria: critical exponents, weighted
// space-time volumes of E_R / F_R / Q_R, the four V quantities of the
// weighted-space criterion, X_delta norms, initial-data conditions and the
// verdict logic that compares fitted growth exponents with the critical one.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavegraph/cutoffs.hpp"
#include "wavegraph/error.hpp"
#include "wavegraph/fit.hpp"
#include "wavegraph/geometry.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

/// p (q + 1)(1 + a) / (pq - 1).
inline double crit_exponent(double p, double q, double alpha) {
    if (!(p >= q && q > 1.0)) fail(ErrorKind::invalid_argument, "crit_exponent needs p >= q > 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in [0, 1]");
    return p * (q + 1.0) * (1.0 + alpha) / (p * q - 1.0);
}

/// (1 + a) p / (p - 1), the exponent of the single-inequality criterion.
inline double single_eq_exponent(double p, double alpha) {
    if (!(p > 1.0)) fail(ErrorKind::invalid_argument, "single_eq_exponent needs p > 1");
    return (1.0 + alpha) * p / (p - 1.0);
}

struct SystemParams {
    double p = 2.0;
    double q = 2.0;
    double theta1 = 2.0;
    double theta2 = 2.0;
    double alpha = 1.0;
    double delta = 1.0;
    double R0 = 1.0;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;

    void validate() const {
        if (!(p >= q && q > 1.0)) fail(ErrorKind::invalid_argument, "system parameters need p >= q > 1");
        if (!(theta1 >= 2.0 && theta2 >= 2.0)) fail(ErrorKind::invalid_argument, "theta1, theta2 must be >= 2");
        if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in [0, 1]");
        if (2.0 * theta1 / theta2 < 1.0 + alpha)
            fail(ErrorKind::invalid_argument, "need 2 theta1 / theta2 >= 1 + alpha");
        if (!(R0 > 0.0)) fail(ErrorKind::invalid_argument, "R0 must be positive");
    }
};

// ---------------------------------------------------------------------------
// Potentials

enum class PotentialForm { constant, radial_temporal, table };

/// Positive space-time coefficient h(x, t).
///   constant:         c
///   radial_temporal:  (1 + d(x, x0))^a (1 + t)^b
///   table:            per-vertex values, time independent
class Potential {
public:
    static Potential constant(double c) {
        Potential h;
        h.form_ = PotentialForm::constant;
        h.c_ = c;
        return h;
    }
    static Potential radial_temporal(double a, double b) {
        Potential h;
        h.form_ = PotentialForm::radial_temporal;
        h.a_ = a;
        h.b_ = b;
        return h;
    }
    static Potential table(std::vector<double> values) {
        Potential h;
        h.form_ = PotentialForm::table;
        h.table_ = std::move(values);
        return h;
    }

    PotentialForm form() const noexcept { return form_; }
    double c() const noexcept { return c_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    const std::vector<double>& values() const noexcept { return table_; }

    bool time_independent() const noexcept { return form_ != PotentialForm::radial_temporal || b_ == 0.0; }
    bool is_identically_one() const noexcept { return form_ == PotentialForm::constant && c_ == 1.0; }

    /// h at vertex x lying at distance d from the base point, time t.
    double at(VertexId x, double d, double t) const {
        switch (form_) {
        case PotentialForm::constant: return c_;
        case PotentialForm::radial_temporal: {
            double v = std::pow(1.0 + d, a_);
            if (b_ != 0.0) v *= std::pow(1.0 + t, b_);
            return v;
        }
        case PotentialForm::table:
            if (x >= table_.size()) fail(ErrorKind::domain_mismatch, "potential table does not cover vertex");
            return table_[x];
        }
        return 0.0;
    }

    /// h^(-gamma) with the positivity check.
    double weight(VertexId x, double d, double t, double gamma) const {
        const double v = at(x, d, t);
        if (!(v > 0.0)) fail(ErrorKind::nonpositive_potential, "potential is not positive at a sampled point");
        return v == 1.0 ? 1.0 : std::pow(v, -gamma);
    }

private:
    Potential() = default;

    PotentialForm form_ = PotentialForm::constant;
    double c_ = 1.0;
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<double> table_;
};

// ---------------------------------------------------------------------------
// Quadrature

struct IntegrationOptions {
    double points_per_unit = 32.0;  ///< Simpson density for time-dependent potentials
    bool force_quadrature = false;  ///< use Simpson even when a closed form exists
};

/// Composite Simpson rule with at least ceil(points_per_unit * (b - a))
/// intervals, rounded up to an even count.
template <class F>
double simpson(F&& f, double a, double b, double points_per_unit) {
    if (!(b > a)) return 0.0;
    auto intervals = static_cast<std::size_t>(std::ceil(points_per_unit * (b - a)));
    intervals = std::max<std::size_t>(intervals, 2);
    if (intervals % 2) ++intervals;
    const double h = (b - a) / static_cast<double>(intervals);
    double acc = f(a) + f(b);
    for (std::size_t k = 1; k < intervals; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
    return acc * h / 3.0;
}

namespace detail {

inline void check_truncation(const PseudoMetric& m, const WeightedGraph& g, std::span<const double> dist,
                             double radius, const char* what) {
    if (!g.has_boundary()) return;
    if (!std::isfinite(radius))
        fail(ErrorKind::truncation_too_small, std::string(what) + ": unbounded shadow on a truncated graph");
    if (layer_meets_ball(m, g, dist, radius))
        fail(ErrorKind::truncation_too_small, std::string(what) + ": shadow reaches the truncation boundary layer");
}

/// integral over [lo, hi] of h(x, t)^(-gamma) dt.
inline double time_weight_integral(const Potential& h, VertexId x, double d, double lo, double hi, double gamma,
                                   const IntegrationOptions& opts) {
    if (!(hi > lo)) return 0.0;
    if (h.time_independent() && !opts.force_quadrature) return h.weight(x, d, 0.0, gamma) * (hi - lo);
    return simpson([&](double t) { return h.weight(x, d, t, gamma); }, lo, hi, opts.points_per_unit);
}

} // namespace detail

/// integral_0^inf sum_x 1_reg(x, t) h(x, t)^(-gamma) mu(x) dt.
inline double region_integral(const WeightedGraph& g, const PseudoMetric& m, VertexId x0, const SpaceTimeRegion& reg,
                              const Potential& h, double gamma, const IntegrationOptions& opts = {}) {
    if (!(gamma > 0.0)) fail(ErrorKind::invalid_argument, "gamma must be positive");
    const auto dist = distances_from(m, g, x0);
    detail::check_truncation(m, g, dist, reg.shadow_radius(), "region_integral");
    double total = 0.0;
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        const auto slice = reg.time_interval(dist[x]);
        if (!slice) continue;
        total += g.mu(x) * detail::time_weight_integral(h, x, dist[x], slice->lo, slice->hi, gamma, opts);
    }
    return total;
}

struct GrowthFit {
    double slope = 0.0;
    double residual = 0.0; ///< max |deviation| of the fitted line in log space
};

struct GrowthSample {
    double R;
    double value;
};

/// Least-squares slope of log(value) against log(R).
inline GrowthFit growth_exponent_estimate(std::span<const GrowthSample> samples) {
    if (samples.size() < 3) fail(ErrorKind::insufficient_data, "growth fit needs at least 3 samples");
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!(samples[k].value > 0.0)) fail(ErrorKind::invalid_argument, "growth fit needs positive values");
        if (k > 0 && !(samples[k].R > samples[k - 1].R))
            fail(ErrorKind::invalid_argument, "growth fit needs strictly increasing R");
        xs.push_back(std::log(samples[k].R));
        ys.push_back(std::log(samples[k].value));
    }
    const LineFit line = fit_line(xs, ys);
    return {line.slope, line.max_residual};
}

// ---------------------------------------------------------------------------
// Verdicts

struct SeriesPoint {
    double R = 0.0;
    std::vector<double> values; ///< one entry per label in CriterionVerdict::labels
};

struct CriterionVerdict {
    std::string mode;
    std::vector<std::string> labels;   ///< names of the sampled quantities
    std::vector<SeriesPoint> series;
    std::vector<double> exponents;     ///< fitted growth exponent per fitted quantity
    double exponent_estimate = 0.0;    ///< largest fitted exponent
    double critical_exponent = 0.0;
    double tolerance = 0.2;
    double fit_residual = 0.0;
    bool satisfied = false;
    std::vector<std::string> notes;
};

inline constexpr double default_tolerance = 0.2;

namespace detail {

inline void check_grid(std::span<const double> grid, double R0, std::size_t min_points) {
    if (grid.size() < min_points)
        fail(ErrorKind::insufficient_data, "R grid needs at least " + std::to_string(min_points) + " points");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid[k] < R0) fail(ErrorKind::invalid_argument, "R grid must lie in [R0, inf)");
        if (k > 0 && !(grid[k] > grid[k - 1])) fail(ErrorKind::invalid_argument, "R grid must increase");
    }
    const double ratio = grid[1] / grid[0];
    for (std::size_t k = 2; k < grid.size(); ++k)
        if (std::abs(grid[k] / grid[k - 1] - ratio) > 1e-9 * ratio)
            fail(ErrorKind::invalid_argument, "R grid must be geometric");
}

inline GrowthFit fit_column(const CriterionVerdict& v, std::size_t column) {
    std::vector<GrowthSample> s;
    for (const auto& pt : v.series) s.push_back({pt.R, pt.values[column]});
    return growth_exponent_estimate(s);
}

inline void finish_verdict(CriterionVerdict& v, std::span<const std::size_t> fitted_columns) {
    v.exponents.clear();
    v.fit_residual = 0.0;
    for (std::size_t c : fitted_columns) {
        const GrowthFit fit = fit_column(v, c);
        v.exponents.push_back(fit.slope);
        v.fit_residual = std::max(v.fit_residual, fit.residual);
    }
    v.exponent_estimate = *std::max_element(v.exponents.begin(), v.exponents.end());
    v.satisfied = v.exponent_estimate <= v.critical_exponent + v.tolerance;
}

} // namespace detail

/// Geometric grid R0 * {1, 2, 4, ...} with `count` points.
inline std::vector<double> default_r_grid(double R0, std::size_t count = 4) {
    std::vector<double> grid;
    for (std::size_t k = 0; k < count; ++k) grid.push_back(R0 * std::pow(2.0, static_cast<double>(k)));
    return grid;
}

/// Both E_R volume conditions of the system criterion over an R grid.
inline CriterionVerdict theorem1_check(const WeightedGraph& g, const PseudoMetric& m, VertexId x0,
                                       const SystemParams& params, const Potential& h1, const Potential& h2,
                                       std::span<const double> R_grid, double tolerance = default_tolerance,
                                       const IntegrationOptions& opts = {}) {
    params.validate();
    detail::check_grid(R_grid, params.R0, 4);
    CriterionVerdict v;
    v.mode = "theorem1";
    v.labels = {"I_h1", "I_h2"};
    v.critical_exponent = crit_exponent(params.p, params.q, params.alpha);
    v.tolerance = tolerance;
    for (double R : R_grid) {
        const auto E = SpaceTimeRegion::E(R, params.theta1, params.theta2);
        v.series.push_back({R,
                            {region_integral(g, m, x0, E, h1, 1.0 / (params.p - 1.0), opts),
                             region_integral(g, m, x0, E, h2, 1.0 / (params.q - 1.0), opts)}});
    }
    const std::size_t cols[] = {0, 1};
    detail::finish_verdict(v, cols);
    v.notes.push_back("initial-data hypothesis used by the nonexistence argument is reported separately "
                      "(initial_data_conditions) and is not part of this verdict");
    return v;
}

/// Single-inequality volume condition with exponent (1 + a) p / (p - 1).
inline CriterionVerdict theoremA_check(const WeightedGraph& g, const PseudoMetric& m, VertexId x0, double p,
                                       double alpha, double theta1, double theta2, double R0, const Potential& h,
                                       std::span<const double> R_grid, double tolerance = default_tolerance,
                                       const IntegrationOptions& opts = {}) {
    SystemParams params{p, p, theta1, theta2, alpha, 1.0, R0};
    params.validate();
    detail::check_grid(R_grid, R0, 4);
    CriterionVerdict v;
    v.mode = "theoremA";
    v.labels = {"I_h"};
    v.critical_exponent = single_eq_exponent(p, alpha);
    v.tolerance = tolerance;
    for (double R : R_grid)
        v.series.push_back(
            {R, {region_integral(g, m, x0, SpaceTimeRegion::E(R, theta1, theta2), h, 1.0 / (p - 1.0), opts)}});
    const std::size_t cols[] = {0};
    detail::finish_verdict(v, cols);
    v.notes.push_back("liminf initial-data hypothesis is reported separately (initial_data_conditions)");
    return v;
}

struct VQuantities {
    double V1 = 0.0;
    double V2 = 0.0;
    double V3 = 0.0;
    double V4 = 0.0;

    double max() const { return std::max({V1, V2, V3, V4}); }
};

/// V1/V3: times [R^((1+a)/2), 2 R^((1+a)/2)] over B_R(x0);
/// V2/V4: times [0, 2 R^((1+a)/2)] over V \ B_R(x0);
/// integrand h^(-gamma) e^(-delta d/R) mu with gamma = 1/(p-1) (V1, V2) or 1/(q-1) (V3, V4).
inline VQuantities v_quantities(const WeightedGraph& g, const PseudoMetric& m, VertexId x0,
                                const SystemParams& params, const Potential& h1, const Potential& h2, double R,
                                const IntegrationOptions& opts = {}) {
    params.validate();
    if (!(params.delta > 0.0)) fail(ErrorKind::invalid_argument, "delta must be positive");
    if (!(R > 0.0)) fail(ErrorKind::invalid_argument, "R must be positive");
    const auto dist = distances_from(m, g, x0);
    detail::check_truncation(m, g, dist, 2.0 * R, "v_quantities");

    const double scale = std::pow(R, (1.0 + params.alpha) / 2.0);
    const double g1 = 1.0 / (params.p - 1.0), g2 = 1.0 / (params.q - 1.0);
    VQuantities v;
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        const double w = std::exp(-params.delta * dist[x] / R) * g.mu(x);
        const bool inside = dist[x] <= R;
        const double lo = inside ? scale : 0.0, hi = 2.0 * scale;
        const double a = w * detail::time_weight_integral(h1, x, dist[x], lo, hi, g1, opts);
        const double b = w * detail::time_weight_integral(h2, x, dist[x], lo, hi, g2, opts);
        if (inside) {
            v.V1 += a;
            v.V3 += b;
        } else {
            v.V2 += a;
            v.V4 += b;
        }
    }
    return v;
}

/// Growth of max(V1, ..., V4) against the system critical exponent.
inline CriterionVerdict theorem2_check(const WeightedGraph& g, const PseudoMetric& m, VertexId x0,
                                       const SystemParams& params, const Potential& h1, const Potential& h2,
                                       std::span<const double> R_grid, double tolerance = default_tolerance,
                                       const IntegrationOptions& opts = {}) {
    params.validate();
    detail::check_grid(R_grid, params.R0, 4);
    CriterionVerdict v;
    v.mode = "theorem2";
    v.labels = {"V1", "V2", "V3", "V4", "max"};
    v.critical_exponent = crit_exponent(params.p, params.q, params.alpha);
    v.tolerance = tolerance;
    for (double R : R_grid) {
        const VQuantities q = v_quantities(g, m, x0, params, h1, h2, R, opts);
        v.series.push_back({R, {q.V1, q.V2, q.V3, q.V4, q.max()}});
    }
    const std::size_t cols[] = {4};
    detail::finish_verdict(v, cols);
    v.notes.push_back("initial data must also lie in X_delta with nonnegative total velocity sums; "
                      "see initial_data_conditions and xdelta_norm");
    return v;
}

/// sum_x |f(x)| e^(-delta d(x, x0)) mu(x).
inline double xdelta_norm(const WeightedGraph& g, const PseudoMetric& m, VertexId x0, std::span<const double> f,
                          double delta) {
    if (!(delta > 0.0)) fail(ErrorKind::invalid_argument, "delta must be positive");
    if (f.size() != g.vertex_count()) fail(ErrorKind::domain_mismatch, "vertex function size does not match graph");
    const auto dist = distances_from(m, g, x0);
    double acc = 0.0;
    for (VertexId x = 0; x < f.size(); ++x) acc += std::abs(f[x]) * std::exp(-delta * dist[x]) * g.mu(x);
    return acc;
}

struct InitialDataRow {
    double R = 0.0;
    // sum_{B_R} f+ mu - sum_{B_2R} f- mu (liminf hypothesis of the single-inequality criterion)
    double liminf_u = 0.0;
    double liminf_v = 0.0;
    // -sum_{B_R} f+ mu + sum_{B_2R} f+ mu, as printed in the argument for the system
    double printed_u = 0.0;
    double printed_v = 0.0;
    // sum_x f(x) phi(d^th1 / R^th1) mu(x): the tested initial-velocity term itself
    double tested_u = 0.0;
    double tested_v = 0.0;
};

struct InitialDataReport {
    double total_u1 = 0.0;
    double total_v1 = 0.0;
    bool total_u1_nonnegative = true;
    bool total_v1_nonnegative = true;
    std::vector<InitialDataRow> rows;
    double liminf_proxy_u = 0.0; ///< minimum of liminf_u over the grid
    double liminf_proxy_v = 0.0;
    bool liminf_ok = true;       ///< both proxies >= 0
    bool printed_ok = true;      ///< some grid R has printed_u <= 0 and printed_v <= 0
};

inline InitialDataReport initial_data_conditions(const WeightedGraph& g, const PseudoMetric& m, VertexId x0,
                                                 std::span<const double> u1, std::span<const double> v1,
                                                 std::span<const double> R_grid, double theta1 = 2.0) {
    const std::size_t n = g.vertex_count();
    if (u1.size() != n || v1.size() != n)
        fail(ErrorKind::domain_mismatch, "vertex function size does not match graph");
    const auto dist = distances_from(m, g, x0);
    InitialDataReport rep;
    for (VertexId x = 0; x < n; ++x) {
        rep.total_u1 += u1[x] * g.mu(x);
        rep.total_v1 += v1[x] * g.mu(x);
    }
    rep.total_u1_nonnegative = rep.total_u1 >= 0.0;
    rep.total_v1_nonnegative = rep.total_v1 >= 0.0;

    bool printed_found = R_grid.empty();
    for (double R : R_grid) {
        InitialDataRow row;
        row.R = R;
        for (VertexId x = 0; x < n; ++x) {
            const double mu = g.mu(x);
            const double up = std::max(u1[x], 0.0), um = std::max(-u1[x], 0.0);
            const double vp = std::max(v1[x], 0.0), vm = std::max(-v1[x], 0.0);
            const bool in_R = dist[x] <= R, in_2R = dist[x] <= 2.0 * R;
            if (in_R) {
                row.liminf_u += up * mu;
                row.liminf_v += vp * mu;
                row.printed_u -= up * mu;
                row.printed_v -= vp * mu;
            }
            if (in_2R) {
                row.liminf_u -= um * mu;
                row.liminf_v -= vm * mu;
                row.printed_u += up * mu;
                row.printed_v += vp * mu;
            }
            const double cut = phi(std::pow(dist[x] / R, theta1)).value;
            row.tested_u += u1[x] * cut * mu;
            row.tested_v += v1[x] * cut * mu;
        }
        if (rep.rows.empty()) {
            rep.liminf_proxy_u = row.liminf_u;
            rep.liminf_proxy_v = row.liminf_v;
        }
        rep.liminf_proxy_u = std::min(rep.liminf_proxy_u, row.liminf_u);
        rep.liminf_proxy_v = std::min(rep.liminf_proxy_v, row.liminf_v);
        if (row.printed_u <= 0.0 && row.printed_v <= 0.0) printed_found = true;
        rep.rows.push_back(row);
    }
    rep.liminf_ok = rep.liminf_proxy_u >= 0.0 && rep.liminf_proxy_v >= 0.0;
    rep.printed_ok = printed_found;
    return rep;
}

struct CoveringReport {
    bool covered = true;
    std::size_t samples = 0;
    std::size_t uncovered = 0;
    int blocks = 0;
};

/// Pointwise check that F_R is contained in the union of E_{kappa R},
/// kappa = 2^(k/th1 - 1), k = 0..blocks, at the vertices of the graph and a
/// uniform time grid. Diagnostic only.
inline CoveringReport covering_check(const WeightedGraph& g, const PseudoMetric& m, VertexId x0, double theta1,
                                     double theta2, double R, int blocks, double points_per_unit = 16.0) {
    if (blocks < 0) fail(ErrorKind::invalid_argument, "block count must be nonnegative");
    const auto F = SpaceTimeRegion::F(R, theta1, theta2);
    std::vector<SpaceTimeRegion> pieces;
    for (int k = 0; k <= blocks; ++k)
        pieces.push_back(SpaceTimeRegion::E(std::pow(2.0, k / theta1 - 1.0) * R, theta1, theta2));
    const auto dist = distances_from(m, g, x0);
    const auto grid = detail::uniform_grid(std::pow(F.upper_level(), 1.0 / theta2), points_per_unit);
    CoveringReport rep;
    rep.blocks = blocks;
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        for (double t : grid) {
            if (!F.contains(dist[x], t)) continue;
            ++rep.samples;
            const bool hit = std::any_of(pieces.begin(), pieces.end(),
                                         [&](const SpaceTimeRegion& e) { return e.contains(dist[x], t); });
            if (!hit) ++rep.uncovered;
        }
    rep.covered = rep.uncovered == 0;
    return rep;
}

} // namespace wavegraph
