#pragma once

// Pseudo-metrics on weighted graphs: distances, jump size, closed balls,
// the Laplacian of the distance function, and empirical checks of the
// structural assumptions (bounded degree, finite jump, decay of Delta d).

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "wavegraph/error.hpp"
#include "wavegraph/fit.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

enum class MetricKind { graph_distance, lattice_l1, lattice_l2, table };

inline std::string_view to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::graph_distance: return "graph";
    case MetricKind::lattice_l1: return "l1";
    case MetricKind::lattice_l2: return "l2";
    case MetricKind::table: return "table";
    }
    return "unknown";
}

/// Dense symmetric distance matrix over dense vertex ids. Construction
/// checks the pseudo-metric axioms; the triangle inequality is checked
/// exhaustively up to `triangle_check_limit` vertices.
class DistanceTable {
public:
    static constexpr std::size_t triangle_check_limit = 300;

    DistanceTable(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
        if (values_.size() != n_ * n_) fail(ErrorKind::metric_invalid, "distance table must be n x n");
        for (std::size_t x = 0; x < n_; ++x) {
            if (at(x, x) != 0.0) fail(ErrorKind::metric_invalid, "d(x,x) must be 0");
            for (std::size_t y = x + 1; y < n_; ++y) {
                if (!(at(x, y) >= 0.0) || !std::isfinite(at(x, y)))
                    fail(ErrorKind::metric_invalid, "distances must be finite and nonnegative");
                if (at(x, y) != at(y, x)) fail(ErrorKind::metric_invalid, "distance table is not symmetric");
            }
        }
        if (n_ <= triangle_check_limit) {
            for (std::size_t z = 0; z < n_; ++z)
                for (std::size_t x = 0; x < n_; ++x)
                    for (std::size_t y = 0; y < n_; ++y)
                        if (at(x, y) > at(x, z) + at(z, y) + 1e-12 * (1.0 + at(x, y)))
                            fail(ErrorKind::metric_invalid,
                                 "triangle inequality fails at (" + std::to_string(x) + ", " +
                                     std::to_string(y) + ") via " + std::to_string(z));
            triangle_verified_ = true;
        }
    }

    std::size_t size() const noexcept { return n_; }
    double at(std::size_t x, std::size_t y) const { return values_[x * n_ + y]; }
    bool triangle_verified() const noexcept { return triangle_verified_; }

private:
    std::size_t n_;
    std::vector<double> values_;
    bool triangle_verified_ = false;
};

class PseudoMetric {
public:
    static PseudoMetric graph_distance() { return PseudoMetric(MetricKind::graph_distance); }
    static PseudoMetric lattice_l1() { return PseudoMetric(MetricKind::lattice_l1); }
    static PseudoMetric lattice_l2() { return PseudoMetric(MetricKind::lattice_l2); }
    static PseudoMetric from_table(DistanceTable table) {
        PseudoMetric m(MetricKind::table);
        m.table_ = std::make_shared<const DistanceTable>(std::move(table));
        return m;
    }

    MetricKind kind() const noexcept { return kind_; }
    const DistanceTable* table() const noexcept { return table_.get(); }

private:
    explicit PseudoMetric(MetricKind kind) : kind_(kind) {}

    MetricKind kind_;
    std::shared_ptr<const DistanceTable> table_;
};

/// Table metric from `d <id1> <id2> <value>` records keyed by graph labels.
/// Each pair may be given in either order; pairs never given are an error.
inline PseudoMetric load_table_metric(std::istream& in, const WeightedGraph& g) {
    const std::size_t n = g.vertex_count();
    constexpr double missing = -1.0;
    std::vector<double> values(n * n, missing);
    for (std::size_t x = 0; x < n; ++x) values[x * n + x] = 0.0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tokens = detail::split_tokens(detail::strip_comment(line));
        if (tokens.empty()) continue;
        if (tokens.size() != 4 || tokens[0] != "d")
            fail(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": expected 'd <id1> <id2> <value>'");
        const auto a = g.find(detail::parse_label(tokens[1], lineno));
        const auto b = g.find(detail::parse_label(tokens[2], lineno));
        if (!a || !b) fail(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": unknown vertex");
        const double v = detail::parse_real(tokens[3], lineno);
        for (auto [x, y] : {std::pair{*a, *b}, std::pair{*b, *a}}) {
            double& slot = values[x * n + y];
            if (slot != missing && slot != v)
                fail(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": conflicting distance");
            slot = v;
        }
    }
    for (double v : values)
        if (v == missing) fail(ErrorKind::metric_invalid, "distance table does not cover every vertex pair");
    return PseudoMetric::from_table(DistanceTable(n, std::move(values)));
}

namespace detail {

inline void require_coordinates(const WeightedGraph& g) {
    if (!g.coordinates())
        fail(ErrorKind::invalid_argument, "lattice metric needs a graph with lattice coordinates");
}

inline double lattice_distance(const LatticeCoordinates& c, MetricKind kind, VertexId x, VertexId y) {
    const auto a = c.at(x), b = c.at(y);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = static_cast<double>(a[k] - b[k]);
        acc += kind == MetricKind::lattice_l1 ? std::abs(diff) : diff * diff;
    }
    return kind == MetricKind::lattice_l1 ? acc : std::sqrt(acc);
}

inline std::vector<double> hop_distances(const WeightedGraph& g, VertexId source) {
    constexpr double unreached = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.vertex_count(), unreached);
    std::queue<VertexId> frontier;
    dist[source] = 0.0;
    frontier.push(source);
    while (!frontier.empty()) {
        const VertexId x = frontier.front();
        frontier.pop();
        for (VertexId y : g.neighbors(x))
            if (dist[y] == unreached) {
                dist[y] = dist[x] + 1.0;
                frontier.push(y);
            }
    }
    return dist;
}

inline void check_table_size(const PseudoMetric& m, const WeightedGraph& g) {
    if (m.table()->size() != g.vertex_count())
        fail(ErrorKind::domain_mismatch, "distance table size does not match graph");
}

} // namespace detail

/// d(x0, y) for every vertex y.
inline std::vector<double> distances_from(const PseudoMetric& m, const WeightedGraph& g, VertexId x0) {
    g.check_vertex(x0);
    const std::size_t n = g.vertex_count();
    switch (m.kind()) {
    case MetricKind::graph_distance: {
        auto dist = detail::hop_distances(g, x0);
        for (double d : dist)
            if (!std::isfinite(d))
                fail(ErrorKind::invalid_argument, "graph distance requires a connected graph");
        return dist;
    }
    case MetricKind::lattice_l1:
    case MetricKind::lattice_l2: {
        detail::require_coordinates(g);
        std::vector<double> dist(n);
        for (VertexId y = 0; y < n; ++y) dist[y] = detail::lattice_distance(*g.coordinates(), m.kind(), x0, y);
        return dist;
    }
    case MetricKind::table: {
        detail::check_table_size(m, g);
        std::vector<double> dist(n);
        for (VertexId y = 0; y < n; ++y) dist[y] = m.table()->at(x0, y);
        return dist;
    }
    }
    return {};
}

inline double distance(const PseudoMetric& m, const WeightedGraph& g, VertexId x, VertexId y) {
    g.check_vertex(x);
    g.check_vertex(y);
    if (x == y) return 0.0;
    switch (m.kind()) {
    case MetricKind::graph_distance: return distances_from(m, g, x)[y];
    case MetricKind::lattice_l1:
    case MetricKind::lattice_l2:
        detail::require_coordinates(g);
        return detail::lattice_distance(*g.coordinates(), m.kind(), x, y);
    case MetricKind::table: detail::check_table_size(m, g); return m.table()->at(x, y);
    }
    return 0.0;
}

/// sup of d(x, y) over edges x ~ y.
inline double jump_size(const PseudoMetric& m, const WeightedGraph& g) {
    double jump = 0.0;
    bool any = false;
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        for (VertexId y : g.neighbors(x)) {
            if (y <= x) continue;
            any = true;
            // Adjacent distinct vertices are one hop apart.
            const double d = m.kind() == MetricKind::graph_distance ? 1.0 : distance(m, g, x, y);
            jump = std::max(jump, d);
        }
    if (!any) fail(ErrorKind::undefined_jump, "jump size is undefined on a graph without edges");
    return jump;
}

/// Closed ball {y : d(x0, y) <= R}, by full scan, ids ascending.
inline std::vector<VertexId> ball(const PseudoMetric& m, const WeightedGraph& g, VertexId x0, double radius) {
    if (radius < 0.0) fail(ErrorKind::invalid_argument, "ball radius must be nonnegative");
    const auto dist = distances_from(m, g, x0);
    std::vector<VertexId> out;
    for (VertexId y = 0; y < dist.size(); ++y)
        if (dist[y] <= radius) out.push_back(y);
    return out;
}

/// Delta applied to y -> d(y, x0), evaluated at x.
inline double laplacian_of_distance(const PseudoMetric& m, const WeightedGraph& g, VertexId x0, VertexId x) {
    g.check_vertex(x);
    return laplacian_at(g, distances_from(m, g, x0), x);
}

/// Vertices within jump-size distance of a truncation boundary vertex,
/// found by walking edges outward from each boundary vertex while the
/// metric distance to it stays <= jump. Empty when the graph has no
/// boundary flags.
inline std::vector<bool> boundary_layer(const PseudoMetric& m, const WeightedGraph& g, double jump) {
    const std::size_t n = g.vertex_count();
    std::vector<bool> layer(n, false);
    if (!g.has_boundary()) return layer;
    if (m.kind() == MetricKind::table) {
        for (VertexId b = 0; b < n; ++b) {
            if (!g.is_boundary(b)) continue;
            for (VertexId y = 0; y < n; ++y)
                if (m.table()->at(b, y) <= jump) layer[y] = true;
        }
        return layer;
    }
    std::vector<VertexId> touched;
    std::vector<double> hops(n, -1.0);
    for (VertexId b = 0; b < n; ++b) {
        if (!g.is_boundary(b)) continue;
        std::queue<VertexId> frontier;
        frontier.push(b);
        hops[b] = 0.0;
        touched.push_back(b);
        while (!frontier.empty()) {
            const VertexId x = frontier.front();
            frontier.pop();
            layer[x] = true;
            for (VertexId y : g.neighbors(x)) {
                if (hops[y] >= 0.0) continue;
                hops[y] = hops[x] + 1.0;
                touched.push_back(y);
                // BFS depth is the hop distance from b.
                const double d = m.kind() == MetricKind::graph_distance ? hops[y] : distance(m, g, b, y);
                if (d <= jump) frontier.push(y);
            }
        }
        for (VertexId t : touched) hops[t] = -1.0;
        touched.clear();
    }
    return layer;
}

struct DistanceViolation {
    VertexId vertex;
    double distance;
    double laplacian; ///< observed Delta d(x, x0)
    double allowed;   ///< C2_bound / d^alpha
};

struct AssumptionOptions {
    bool include_boundary = false;     ///< scan the truncation boundary layer too
    std::optional<double> C2_bound;    ///< constant to test Delta d against; none -> empirical
    std::optional<double> max_radius;  ///< restrict the scan to d <= max_radius
};

struct AssumptionAReport {
    double C1 = 0.0;
    double j = 0.0;
    double alpha = 0.0;
    double C2 = 0.0; ///< smallest constant making the decay bound hold on the scanned set
    double R0 = 0.0;
    std::optional<double> C2_bound;
    std::vector<DistanceViolation> violations;
    std::vector<VertexId> excluded_boundary;
    std::size_t scanned = 0;
    double max_scanned_distance = 0.0;
    std::string finite_balls = "not checkable on truncation";

    bool ok() const noexcept { return violations.empty(); }
};

inline AssumptionAReport assumption_a_report(const PseudoMetric& m, const WeightedGraph& g, VertexId x0,
                                             double alpha, double R0, const AssumptionOptions& opts = {}) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in [0, 1]");
    if (!(R0 > 0.0)) fail(ErrorKind::invalid_argument, "R0 must be positive");

    AssumptionAReport report;
    report.alpha = alpha;
    report.R0 = R0;
    report.C1 = max_weighted_degree(g);
    report.j = jump_size(m, g);
    report.C2_bound = opts.C2_bound;

    const auto dist = distances_from(m, g, x0);
    const auto layer = boundary_layer(m, g, report.j);
    const auto lap = laplacian_apply(g, dist);

    double c2 = 0.0;
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        if (!(dist[x] > R0)) continue;
        if (opts.max_radius && dist[x] > *opts.max_radius) continue;
        if (layer[x] && !opts.include_boundary) {
            report.excluded_boundary.push_back(x);
            continue;
        }
        ++report.scanned;
        report.max_scanned_distance = std::max(report.max_scanned_distance, dist[x]);
        const double scale = std::pow(dist[x], alpha);
        c2 = std::max(c2, lap[x] * scale);
        if (opts.C2_bound) {
            const double allowed = *opts.C2_bound / scale;
            if (lap[x] > allowed + 1e-12 * std::max(1.0, std::abs(allowed)))
                report.violations.push_back({x, dist[x], lap[x], allowed});
        }
    }
    if (report.scanned == 0) fail(ErrorKind::empty_scan, "no vertex lies outside B_R0(x0) in the scanned set");
    report.C2 = c2;
    return report;
}

struct ShellSample {
    double r = 0.0;                 ///< shell is [r, 2r)
    double max_positive_laplacian = 0.0;
    std::size_t count = 0;
};

struct AlphaFit {
    double alpha_hat = 0.0; ///< clamped to [0, 1]
    double C2_hat = 0.0;
    double raw_slope = 0.0; ///< fitted slope of log max(Delta d)+ against log r
    double residual = 0.0;
    std::vector<ShellSample> used;
    std::vector<ShellSample> excluded;
};

/// Log-log fit of the shell maxima of (Delta d)+ over geometric shells
/// [R0 2^k, R0 2^(k+1)), interior vertices only.
inline AlphaFit fit_alpha(const PseudoMetric& m, const WeightedGraph& g, VertexId x0, double R0) {
    if (!(R0 > 0.0)) fail(ErrorKind::invalid_argument, "R0 must be positive");
    const auto dist = distances_from(m, g, x0);
    const auto layer = boundary_layer(m, g, jump_size(m, g));
    const auto lap = laplacian_apply(g, dist);

    double reach = 0.0;
    for (VertexId x = 0; x < dist.size(); ++x)
        if (!layer[x]) reach = std::max(reach, dist[x]);

    AlphaFit fit;
    std::vector<double> xs, ys;
    for (double r = R0; r <= reach; r *= 2.0) {
        ShellSample shell{r, 0.0, 0};
        for (VertexId x = 0; x < dist.size(); ++x) {
            if (layer[x] || dist[x] < r || dist[x] >= 2.0 * r) continue;
            ++shell.count;
            shell.max_positive_laplacian = std::max(shell.max_positive_laplacian, std::max(lap[x], 0.0));
        }
        if (shell.count == 0 || shell.max_positive_laplacian <= 0.0) {
            fit.excluded.push_back(shell);
            continue;
        }
        fit.used.push_back(shell);
        xs.push_back(std::log(r));
        ys.push_back(std::log(shell.max_positive_laplacian));
    }
    if (fit.used.size() < 3)
        fail(ErrorKind::insufficient_data, "fit_alpha needs at least 3 shells with positive Delta d, got " +
                                               std::to_string(fit.used.size()));
    const LineFit line = fit_line(xs, ys);
    fit.raw_slope = line.slope;
    fit.alpha_hat = std::clamp(-line.slope, 0.0, 1.0);
    fit.C2_hat = std::exp(line.intercept);
    fit.residual = line.max_residual;
    return fit;
}

} // namespace wavegraph
