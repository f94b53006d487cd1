#pragma once

// Weighted graphs (V, E, omega, mu), the graph Laplacian and the standard
// generator families used by the experiments.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wavegraph/error.hpp"

namespace wavegraph {

using VertexId = std::size_t;
using Label = std::uint64_t;

/// Real-valued function on the vertices, indexed by dense vertex id.
using VertexFunction = std::vector<double>;

/// Integer coordinates carried by lattice truncations; row-major, one row per vertex.
struct LatticeCoordinates {
    int dimension = 0;
    std::vector<int> values;

    std::span<const int> at(VertexId x) const {
        return {values.data() + x * static_cast<std::size_t>(dimension),
                static_cast<std::size_t>(dimension)};
    }
};

struct Edge {
    VertexId a;
    VertexId b;
    double weight;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable weighted graph. Adjacency is held in compressed rows sorted by
/// target; every unordered pair appears in both rows so the Laplacian loop
/// reads one contiguous row per vertex.
class WeightedGraph {
public:
    WeightedGraph() = default;

    std::size_t vertex_count() const noexcept { return mu_.size(); }
    double mu(VertexId x) const { return mu_.at(x); }
    std::span<const double> mu_values() const noexcept { return mu_; }

    std::span<const VertexId> neighbors(VertexId x) const {
        check_vertex(x);
        return {targets_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
    }
    std::span<const double> weights(VertexId x) const {
        check_vertex(x);
        return {weights_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
    }

    /// omega_xy, zero when x and y are not adjacent.
    double weight(VertexId x, VertexId y) const {
        const auto nbr = neighbors(x);
        const auto it = std::lower_bound(nbr.begin(), nbr.end(), y);
        if (it == nbr.end() || *it != y) return 0.0;
        return weights_[offsets_[x] + static_cast<std::size_t>(it - nbr.begin())];
    }

    /// Unordered pairs {x, y}, x < y, read from the row of the smaller endpoint.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (VertexId x = 0; x < vertex_count(); ++x) {
            const auto nbr = neighbors(x);
            const auto w = weights(x);
            for (std::size_t k = 0; k < nbr.size(); ++k)
                if (nbr[k] > x) out.push_back({x, nbr[k], w[k]});
        }
        return out;
    }
    std::size_t edge_count() const {
        std::size_t n = 0;
        for (VertexId x = 0; x < vertex_count(); ++x)
            for (VertexId y : neighbors(x))
                if (y > x) ++n;
        return n;
    }
    std::size_t arc_count() const noexcept { return targets_.size(); }

    Label label(VertexId x) const { return labels_.at(x); }
    std::optional<VertexId> find(Label label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    VertexId index_of(Label label) const {
        auto x = find(label);
        if (!x) fail(ErrorKind::unknown_vertex, "unknown vertex label " + std::to_string(label));
        return *x;
    }

    const std::optional<LatticeCoordinates>& coordinates() const noexcept { return coords_; }

    /// Vertices on the cut of a finite truncation of an infinite family.
    /// Empty for graphs that are complete as given.
    bool has_boundary() const noexcept { return !boundary_.empty(); }
    bool is_boundary(VertexId x) const { return !boundary_.empty() && boundary_.at(x); }

    void check_vertex(VertexId x) const {
        if (x >= vertex_count())
            fail(ErrorKind::unknown_vertex, "vertex " + std::to_string(x) + " not in graph");
    }

private:
    friend class GraphBuilder;

    std::vector<double> mu_;
    std::vector<std::size_t> offsets_{0};
    std::vector<VertexId> targets_;
    std::vector<double> weights_;
    std::vector<Label> labels_;
    std::unordered_map<Label, VertexId> index_;
    std::optional<LatticeCoordinates> coords_;
    std::vector<bool> boundary_;
};

/// Accumulates raw vertex and arc data. Nothing is validated beyond
/// structural consistency so that `validate_graph` can report axiom
/// violations on graphs built from untrusted input.
class GraphBuilder {
public:
    VertexId add_vertex(double mu) { return add_vertex(static_cast<Label>(mu_.size()), mu); }

    VertexId add_vertex(Label label, double mu) {
        if (index_.contains(label))
            fail(ErrorKind::invalid_argument, "duplicate vertex label " + std::to_string(label));
        const VertexId id = mu_.size();
        mu_.push_back(mu);
        labels_.push_back(label);
        index_.emplace(label, id);
        return id;
    }

    std::size_t vertex_count() const noexcept { return mu_.size(); }

    /// Symmetric pair omega_ab = omega_ba = weight.
    void add_edge(VertexId a, VertexId b, double weight) {
        add_arc(a, b, weight);
        if (a != b) add_arc(b, a, weight);
    }

    /// One direction only; used to represent asymmetric raw data.
    void add_arc(VertexId from, VertexId to, double weight) {
        if (from >= mu_.size() || to >= mu_.size())
            fail(ErrorKind::unknown_vertex, "arc endpoint out of range");
        if (weight == 0.0) return;
        arcs_.push_back({from, to, weight});
    }

    void set_coordinates(LatticeCoordinates coords) { coords_ = std::move(coords); }
    void set_boundary(std::vector<bool> flags) { boundary_ = std::move(flags); }

    WeightedGraph build() && {
        WeightedGraph g;
        const std::size_t n = mu_.size();
        std::sort(arcs_.begin(), arcs_.end(), [](const Edge& l, const Edge& r) {
            return l.a != r.a ? l.a < r.a : l.b < r.b;
        });
        g.offsets_.assign(n + 1, 0);
        for (std::size_t k = 0; k < arcs_.size(); ++k) {
            const Edge& e = arcs_[k];
            if (k > 0 && arcs_[k - 1].a == e.a && arcs_[k - 1].b == e.b) {
                if (arcs_[k - 1].weight != e.weight)
                    fail(ErrorKind::invalid_argument, "conflicting weights for arc " +
                                                          std::to_string(labels_[e.a]) + "->" +
                                                          std::to_string(labels_[e.b]));
                continue;
            }
            g.targets_.push_back(e.b);
            g.weights_.push_back(e.weight);
            ++g.offsets_[e.a + 1];
        }
        for (std::size_t x = 0; x < n; ++x) g.offsets_[x + 1] += g.offsets_[x];
        g.mu_ = std::move(mu_);
        g.labels_ = std::move(labels_);
        g.index_ = std::move(index_);
        if (coords_) {
            if (coords_->values.size() != n * static_cast<std::size_t>(coords_->dimension))
                fail(ErrorKind::invalid_argument, "coordinate table size mismatch");
            g.coords_ = std::move(coords_);
        }
        if (!boundary_.empty()) {
            if (boundary_.size() != n) fail(ErrorKind::invalid_argument, "boundary flag size mismatch");
            g.boundary_ = std::move(boundary_);
        }
        return g;
    }

private:
    std::vector<double> mu_;
    std::vector<Label> labels_;
    std::unordered_map<Label, VertexId> index_;
    std::vector<Edge> arcs_;
    std::optional<LatticeCoordinates> coords_;
    std::vector<bool> boundary_;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { loop, asymmetry, negative_weight, nonpositive_mu, disconnected };

inline std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::loop: return "loop";
    case ViolationKind::asymmetry: return "asymmetry";
    case ViolationKind::negative_weight: return "negative_weight";
    case ViolationKind::nonpositive_mu: return "nonpositive_mu";
    case ViolationKind::disconnected: return "disconnected";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::vector<VertexId> vertices;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t component_count = 0;

    bool ok() const noexcept { return violations.empty(); }
    bool has(ViolationKind kind) const {
        return std::any_of(violations.begin(), violations.end(),
                           [kind](const Violation& v) { return v.kind == kind; });
    }
};

/// Connected components under omega_xy > 0, arcs read in either direction.
/// Returns one component id per vertex.
inline std::vector<std::size_t> connected_components(const WeightedGraph& g,
                                                     std::size_t* count = nullptr) {
    const std::size_t n = g.vertex_count();
    std::vector<std::vector<VertexId>> undirected(n);
    for (VertexId x = 0; x < n; ++x)
        for (VertexId y : g.neighbors(x)) {
            undirected[x].push_back(y);
            undirected[y].push_back(x);
        }
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> comp(n, unset);
    std::size_t c = 0;
    std::queue<VertexId> frontier;
    for (VertexId s = 0; s < n; ++s) {
        if (comp[s] != unset) continue;
        comp[s] = c;
        frontier.push(s);
        while (!frontier.empty()) {
            const VertexId x = frontier.front();
            frontier.pop();
            for (VertexId y : undirected[x])
                if (comp[y] == unset) {
                    comp[y] = c;
                    frontier.push(y);
                }
        }
        ++c;
    }
    if (count) *count = c;
    return comp;
}

inline ValidationReport validate_graph(const WeightedGraph& g) {
    ValidationReport report;
    const std::size_t n = g.vertex_count();

    Violation loops{ViolationKind::loop, {}, "omega_xx > 0"};
    Violation asym{ViolationKind::asymmetry, {}, "omega_xy != omega_yx"};
    Violation negative{ViolationKind::negative_weight, {}, "omega_xy < 0"};
    Violation mass{ViolationKind::nonpositive_mu, {}, "mu(x) <= 0 or not finite"};

    for (VertexId x = 0; x < n; ++x) {
        if (!(g.mu(x) > 0.0) || !std::isfinite(g.mu(x))) mass.vertices.push_back(x);
        const auto nbr = g.neighbors(x);
        const auto w = g.weights(x);
        for (std::size_t k = 0; k < nbr.size(); ++k) {
            const VertexId y = nbr[k];
            if (y == x) loops.vertices.push_back(x);
            if (w[k] < 0.0) negative.vertices.push_back(x);
            if (y > x && g.weight(y, x) != w[k]) {
                asym.vertices.push_back(x);
                asym.vertices.push_back(y);
            }
            if (y < x && g.weight(y, x) == 0.0) {
                asym.vertices.push_back(y);
                asym.vertices.push_back(x);
            }
        }
    }
    for (Violation* v : {&loops, &asym, &negative, &mass})
        if (!v->vertices.empty()) report.violations.push_back(std::move(*v));

    const auto comp = connected_components(g, &report.component_count);
    if (report.component_count > 1) {
        Violation split{ViolationKind::disconnected, {},
                        std::to_string(report.component_count) + " components"};
        std::vector<bool> seen(report.component_count, false);
        for (VertexId x = 0; x < n; ++x)
            if (!seen[comp[x]]) {
                seen[comp[x]] = true;
                split.vertices.push_back(x);
            }
        report.violations.push_back(std::move(split));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Laplacian

/// out(x) = sum_{y~x} omega_xy / mu(x) * (f(y) - f(x)).
inline void laplacian_apply(const WeightedGraph& g, std::span<const double> f, std::span<double> out) {
    const std::size_t n = g.vertex_count();
    if (f.size() != n || out.size() != n)
        fail(ErrorKind::domain_mismatch, "vertex function size does not match graph");
    for (VertexId x = 0; x < n; ++x) {
        const auto nbr = g.neighbors(x);
        const auto w = g.weights(x);
        const double fx = f[x];
        double acc = 0.0;
        for (std::size_t k = 0; k < nbr.size(); ++k) acc += w[k] * (f[nbr[k]] - fx);
        out[x] = acc / g.mu(x);
    }
}

inline VertexFunction laplacian_apply(const WeightedGraph& g, std::span<const double> f) {
    VertexFunction out(g.vertex_count());
    laplacian_apply(g, f, out);
    return out;
}

inline double laplacian_at(const WeightedGraph& g, std::span<const double> f, VertexId x) {
    if (f.size() != g.vertex_count())
        fail(ErrorKind::domain_mismatch, "vertex function size does not match graph");
    const auto nbr = g.neighbors(x);
    const auto w = g.weights(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < nbr.size(); ++k) acc += w[k] * (f[nbr[k]] - f[x]);
    return acc / g.mu(x);
}

/// sum_{y~x} omega_xy / mu(x); the maximum over x is the smallest admissible C1.
inline double weighted_degree(const WeightedGraph& g, VertexId x) {
    const auto w = g.weights(x);
    return std::accumulate(w.begin(), w.end(), 0.0) / g.mu(x);
}

inline double max_weighted_degree(const WeightedGraph& g) {
    double best = 0.0;
    for (VertexId x = 0; x < g.vertex_count(); ++x) best = std::max(best, weighted_degree(g, x));
    return best;
}

// ---------------------------------------------------------------------------
// Generators

/// Z^N intersected with [-L, L]^N, unit weights, nearest-neighbour edges.
/// Vertices are numbered in row-major order of their coordinates; vertices
/// with some |coordinate| = L are flagged as truncation boundary.
inline WeightedGraph generate_lattice(int dimension, int half_width) {
    if (dimension < 1 || dimension > 4)
        fail(ErrorKind::invalid_argument, "lattice dimension must be in [1, 4]");
    if (half_width < 1) fail(ErrorKind::invalid_argument, "lattice half-width must be >= 1");

    const std::size_t side = 2 * static_cast<std::size_t>(half_width) + 1;
    std::size_t n = 1;
    for (int k = 0; k < dimension; ++k) n *= side;

    GraphBuilder b;
    LatticeCoordinates coords{dimension, std::vector<int>(n * dimension)};
    std::vector<bool> boundary(n, false);
    std::vector<std::size_t> stride(dimension);
    stride[dimension - 1] = 1;
    for (int k = dimension - 2; k >= 0; --k) stride[k] = stride[k + 1] * side;

    for (std::size_t id = 0; id < n; ++id) {
        b.add_vertex(1.0);
        std::size_t rest = id;
        for (int k = 0; k < dimension; ++k) {
            const int c = static_cast<int>(rest / stride[k]) - half_width;
            rest %= stride[k];
            coords.values[id * dimension + k] = c;
            if (std::abs(c) == half_width) boundary[id] = true;
        }
    }
    for (std::size_t id = 0; id < n; ++id)
        for (int k = 0; k < dimension; ++k)
            if (coords.values[id * dimension + k] < half_width) b.add_edge(id, id + stride[k], 1.0);

    b.set_coordinates(std::move(coords));
    b.set_boundary(std::move(boundary));
    return std::move(b).build();
}

/// Dense id of the lattice point with the given coordinates.
inline VertexId lattice_vertex(const WeightedGraph& g, std::span<const int> point) {
    const auto& coords = g.coordinates();
    if (!coords) fail(ErrorKind::invalid_argument, "graph carries no lattice coordinates");
    if (static_cast<int>(point.size()) != coords->dimension)
        fail(ErrorKind::domain_mismatch, "point dimension does not match lattice");
    // The first vertex sits at (-L, ..., -L).
    const int half_width = -coords->values[0];
    const std::size_t side = 2 * static_cast<std::size_t>(half_width) + 1;
    std::size_t id = 0;
    for (int c : point) {
        if (std::abs(c) > half_width) fail(ErrorKind::unknown_vertex, "point outside lattice truncation");
        id = id * side + static_cast<std::size_t>(c + half_width);
    }
    return id;
}

inline VertexId lattice_origin(const WeightedGraph& g) {
    const auto& coords = g.coordinates();
    if (!coords) fail(ErrorKind::invalid_argument, "graph carries no lattice coordinates");
    return lattice_vertex(g, std::vector<int>(coords->dimension, 0));
}

/// Rooted b-ary tree with `depth` levels below the root; leaves are flagged
/// as truncation boundary. Vertices are numbered breadth-first, root = 0.
inline WeightedGraph generate_tree(int branching, int depth) {
    if (branching < 2) fail(ErrorKind::invalid_argument, "tree branching must be >= 2");
    if (depth < 1) fail(ErrorKind::invalid_argument, "tree depth must be >= 1");
    GraphBuilder b;
    b.add_vertex(1.0);
    std::vector<bool> boundary{false};
    std::size_t level_begin = 0, level_end = 1;
    for (int level = 1; level <= depth; ++level) {
        for (std::size_t parent = level_begin; parent < level_end; ++parent)
            for (int c = 0; c < branching; ++c) {
                const VertexId child = b.add_vertex(1.0);
                b.add_edge(parent, child, 1.0);
                boundary.push_back(level == depth);
            }
        level_begin = level_end;
        level_end = b.vertex_count();
    }
    b.set_boundary(std::move(boundary));
    return std::move(b).build();
}

/// Path 0 - 1 - ... - (n-1), unit weights.
inline WeightedGraph generate_path(int length) {
    if (length < 2) fail(ErrorKind::invalid_argument, "path length must be >= 2");
    GraphBuilder b;
    for (int k = 0; k < length; ++k) b.add_vertex(1.0);
    for (int k = 0; k + 1 < length; ++k) b.add_edge(k, k + 1, 1.0);
    return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Text format: `v <id> <mu>` and `e <id1> <id2> <omega>` records, `#` comments.

namespace detail {

inline std::string format_real(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
        out.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

inline Label parse_label(std::string_view tok, std::size_t lineno) {
    Label value = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        fail(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": bad vertex id '" +
                                         std::string(tok) + "'");
    return value;
}

inline double parse_real(std::string_view tok, std::size_t lineno) {
    double value = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(value))
        fail(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": bad number '" +
                                         std::string(tok) + "'");
    return value;
}

inline std::string_view strip_comment(std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

} // namespace detail

enum class LoadMode {
    strict,  ///< reject loops and nonpositive mu
    lenient, ///< keep them so validate_graph can report them
};

/// Dense ids are assigned in increasing label order, so a saved graph
/// reloads with identical numbering.
inline WeightedGraph load_graph(std::istream& in, LoadMode mode = LoadMode::strict) {
    std::map<Label, double> vertices;
    std::map<std::pair<Label, Label>, double> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tokens = detail::split_tokens(detail::strip_comment(line));
        if (tokens.empty()) continue;
        const auto where = "line " + std::to_string(lineno) + ": ";
        if (tokens[0] == "v") {
            if (tokens.size() != 3) fail(ErrorKind::parse_error, where + "expected 'v <id> <mu>'");
            const Label id = detail::parse_label(tokens[1], lineno);
            const double mu = detail::parse_real(tokens[2], lineno);
            if (mode == LoadMode::strict && !(mu > 0.0))
                fail(ErrorKind::parse_error, where + "vertex weight must be positive");
            if (!vertices.emplace(id, mu).second)
                fail(ErrorKind::parse_error, where + "duplicate vertex " + std::to_string(id));
        } else if (tokens[0] == "e") {
            if (tokens.size() != 4) fail(ErrorKind::parse_error, where + "expected 'e <id1> <id2> <omega>'");
            Label a = detail::parse_label(tokens[1], lineno);
            Label b = detail::parse_label(tokens[2], lineno);
            const double w = detail::parse_real(tokens[3], lineno);
            if (a == b && mode == LoadMode::strict)
                fail(ErrorKind::parse_error, where + "loop at vertex " + std::to_string(a));
            if (w < 0.0) fail(ErrorKind::parse_error, where + "negative edge weight");
            if (a > b) std::swap(a, b);
            auto [it, fresh] = edges.emplace(std::make_pair(a, b), w);
            if (!fresh && it->second != w)
                fail(ErrorKind::parse_error, where + "duplicate edge with conflicting weight");
        } else {
            fail(ErrorKind::parse_error, where + "unknown record '" + std::string(tokens[0]) + "'");
        }
    }

    GraphBuilder b;
    for (const auto& [id, mu] : vertices) b.add_vertex(id, mu);
    auto lookup = [&](Label id) {
        auto it = vertices.find(id);
        if (it == vertices.end())
            fail(ErrorKind::parse_error, "edge references undeclared vertex " + std::to_string(id));
        return static_cast<VertexId>(std::distance(vertices.begin(), it));
    };
    for (const auto& [key, w] : edges) b.add_edge(lookup(key.first), lookup(key.second), w);
    return std::move(b).build();
}

inline WeightedGraph load_graph(std::string_view text, LoadMode mode = LoadMode::strict) {
    std::istringstream in{std::string(text)};
    return load_graph(in, mode);
}

/// Vertices sorted by label, then edges with label1 < label2 in lexicographic order.
inline void save_graph(const WeightedGraph& g, std::ostream& out) {
    std::vector<VertexId> order(g.vertex_count());
    std::iota(order.begin(), order.end(), VertexId{0});
    std::sort(order.begin(), order.end(), [&](VertexId l, VertexId r) { return g.label(l) < g.label(r); });
    for (VertexId x : order) out << "v " << g.label(x) << ' ' << detail::format_real(g.mu(x)) << '\n';

    struct Row {
        Label a, b;
        double w;
    };
    std::vector<Row> rows;
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        const auto nbr = g.neighbors(x);
        const auto w = g.weights(x);
        for (std::size_t k = 0; k < nbr.size(); ++k) {
            const Label a = g.label(x), b = g.label(nbr[k]);
            if (a <= b) rows.push_back({a, b, w[k]});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& l, const Row& r) {
        return l.a != r.a ? l.a < r.a : l.b < r.b;
    });
    for (const Row& r : rows) out << "e " << r.a << ' ' << r.b << ' ' << detail::format_real(r.w) << '\n';
}

inline std::string save_graph(const WeightedGraph& g) {
    std::ostringstream out;
    save_graph(g, out);
    return out.str();
}

/// Same vertex labels, masses and edge weights.
inline bool same_graph(const WeightedGraph& a, const WeightedGraph& b) {
    if (a.vertex_count() != b.vertex_count()) return false;
    for (VertexId x = 0; x < a.vertex_count(); ++x) {
        const auto y = b.find(a.label(x));
        if (!y || a.mu(x) != b.mu(*y)) return false;
        if (a.neighbors(x).size() != b.neighbors(*y).size()) return false;
        const auto nbr = a.neighbors(x);
        const auto w = a.weights(x);
        for (std::size_t k = 0; k < nbr.size(); ++k) {
            const auto z = b.find(a.label(nbr[k]));
            if (!z || b.weight(*y, *z) != w[k]) return false;
        }
    }
    return true;
}

} // namespace wavegraph
