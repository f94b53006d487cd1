#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "support.hpp"
#include "wavegraph/graph.hpp"

using namespace wavegraph;

namespace {

WeightedGraph path3() { return generate_path(3); }

WeightedGraph two_vertex(double w, double mu_a, double mu_b) {
    GraphBuilder b;
    const auto a = b.add_vertex(mu_a);
    const auto c = b.add_vertex(mu_b);
    b.add_edge(a, c, w);
    return std::move(b).build();
}

} // namespace

TEST(Validate, PathIsValid) {
    const auto report = validate_graph(path3());
    EXPECT_TRUE(report.ok());
    EXPECT_TRUE(report.violations.empty());
    EXPECT_EQ(report.component_count, 1u);
}

TEST(Validate, LoopIsReported) {
    GraphBuilder b;
    for (int k = 0; k < 3; ++k) b.add_vertex(1.0);
    b.add_edge(0, 1, 1.0);
    b.add_edge(1, 2, 1.0);
    b.add_edge(0, 0, 1.0);
    const auto g = std::move(b).build();
    const auto report = validate_graph(g);
    ASSERT_TRUE(report.has(ViolationKind::loop));
    for (const auto& v : report.violations)
        if (v.kind == ViolationKind::loop) {
            EXPECT_EQ(v.vertices, std::vector<VertexId>{0});
        }
}

TEST(Validate, TwoComponents) {
    GraphBuilder b;
    for (int k = 0; k < 4; ++k) b.add_vertex(1.0);
    b.add_edge(0, 1, 1.0);
    b.add_edge(2, 3, 1.0);
    const auto report = validate_graph(std::move(b).build());
    EXPECT_TRUE(report.has(ViolationKind::disconnected));
    EXPECT_EQ(report.component_count, 2u);
}

TEST(Validate, AsymmetryAndMass) {
    GraphBuilder b;
    b.add_vertex(1.0);
    b.add_vertex(-1.0);
    b.add_arc(0, 1, 1.0);
    b.add_arc(1, 0, 2.0);
    const auto report = validate_graph(std::move(b).build());
    EXPECT_TRUE(report.has(ViolationKind::asymmetry));
    EXPECT_TRUE(report.has(ViolationKind::nonpositive_mu));
    EXPECT_FALSE(report.ok());
}

TEST(Validate, MissingReverseArc) {
    GraphBuilder b;
    b.add_vertex(1.0);
    b.add_vertex(1.0);
    b.add_arc(0, 1, 1.0);
    EXPECT_TRUE(validate_graph(std::move(b).build()).has(ViolationKind::asymmetry));
}

TEST(Laplacian, PathBump) {
    const auto g = path3();
    const VertexFunction f{0.0, 1.0, 0.0};
    const auto lap = laplacian_apply(g, f);
    EXPECT_DOUBLE_EQ(lap[0], 1.0);
    EXPECT_DOUBLE_EQ(lap[1], -2.0);
    EXPECT_DOUBLE_EQ(lap[2], 1.0);
}

TEST(Laplacian, WeightedEdge) {
    const auto g = two_vertex(2.0, 1.0, 4.0);
    const VertexFunction f{1.0, 0.0};
    const auto lap = laplacian_apply(g, f);
    EXPECT_DOUBLE_EQ(lap[0], -2.0);
    EXPECT_DOUBLE_EQ(lap[1], 0.5);
    EXPECT_DOUBLE_EQ(laplacian_at(g, f, 1), 0.5);
}

TEST(Laplacian, ConstantsAreAnnihilated) {
    std::mt19937_64 rng(7);
    const auto g = fixtures::random_graph(rng, 60, 80);
    const VertexFunction f(g.vertex_count(), 3.25);
    for (double v : laplacian_apply(g, f)) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, DomainMismatch) {
    const auto g = path3();
    const VertexFunction f{1.0, 2.0};
    try {
        laplacian_apply(g, f);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain_mismatch);
    }
}

TEST(Laplacian, MatchesDenseOnRandomGraphs) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> size(2, 200);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = size(rng);
        const auto g = fixtures::random_graph(rng, n, n);
        ASSERT_TRUE(validate_graph(g).ok());
        const auto f = fixtures::random_function(rng, n);
        const auto sparse = laplacian_apply(g, f);
        const auto dense = fixtures::dense_laplacian(g, f);
        double flux = 0.0, scale = 0.0;
        for (VertexId x = 0; x < n; ++x) {
            EXPECT_NEAR(sparse[x], dense[x], 1e-12 * std::max(1.0, std::abs(dense[x])));
            flux += g.mu(x) * sparse[x];
            scale += std::abs(g.mu(x) * sparse[x]);
        }
        EXPECT_LE(std::abs(flux), 1e-10 * std::max(1.0, scale));
    }
}

TEST(Degree, Values) {
    const auto lattice = generate_lattice(2, 3);
    EXPECT_DOUBLE_EQ(weighted_degree(lattice, lattice_origin(lattice)), 4.0);
    EXPECT_DOUBLE_EQ(max_weighted_degree(lattice), 4.0);

    GraphBuilder b;
    b.add_vertex(1.0);
    const auto single = std::move(b).build();
    EXPECT_DOUBLE_EQ(weighted_degree(single, 0), 0.0);

    EXPECT_DOUBLE_EQ(weighted_degree(two_vertex(2.0, 1.0, 4.0), 1), 0.5);
}

TEST(Generators, LatticeCounts) {
    const auto l1 = generate_lattice(1, 2);
    EXPECT_EQ(l1.vertex_count(), 5u);
    EXPECT_EQ(l1.edge_count(), 4u);
    const auto l2 = generate_lattice(2, 1);
    EXPECT_EQ(l2.vertex_count(), 9u);
    EXPECT_EQ(l2.edge_count(), 12u);
    EXPECT_EQ(generate_lattice(2, 50).vertex_count(), 10201u);
    const auto l3 = generate_lattice(3, 2);
    EXPECT_EQ(l3.vertex_count(), 125u);
    EXPECT_EQ(l3.edge_count(), 3u * 5u * 5u * 4u);
}

TEST(Generators, LatticeCoordinates) {
    const auto g = generate_lattice(2, 2);
    const int point[] = {1, -2};
    const VertexId x = lattice_vertex(g, point);
    EXPECT_EQ(g.coordinates()->at(x)[0], 1);
    EXPECT_EQ(g.coordinates()->at(x)[1], -2);
    EXPECT_TRUE(g.is_boundary(x));
    EXPECT_FALSE(g.is_boundary(lattice_origin(g)));
}

TEST(Generators, TreeAndPath) {
    EXPECT_EQ(generate_tree(2, 3).vertex_count(), 15u);
    EXPECT_EQ(generate_tree(3, 2).vertex_count(), 13u);
    const auto p = generate_path(3);
    EXPECT_EQ(p.vertex_count(), 3u);
    EXPECT_EQ(p.weight(0, 1), 1.0);
    EXPECT_EQ(p.weight(1, 2), 1.0);
    EXPECT_EQ(p.weight(0, 2), 0.0);
}

TEST(Generators, OutputsValidate) {
    for (int n = 1; n <= 4; ++n) EXPECT_TRUE(validate_graph(generate_lattice(n, 2)).ok());
    EXPECT_TRUE(validate_graph(generate_tree(2, 5)).ok());
    EXPECT_TRUE(validate_graph(generate_tree(4, 3)).ok());
    EXPECT_TRUE(validate_graph(generate_path(2)).ok());
    EXPECT_TRUE(validate_graph(generate_path(17)).ok());
}

TEST(Generators, RangeErrors) {
    EXPECT_THROW(generate_lattice(0, 2), Error);
    EXPECT_THROW(generate_lattice(5, 2), Error);
    EXPECT_THROW(generate_lattice(2, 0), Error);
    EXPECT_THROW(generate_tree(1, 3), Error);
    EXPECT_THROW(generate_tree(2, 0), Error);
    EXPECT_THROW(generate_path(1), Error);
}

TEST(GraphIo, LoadEdge) {
    const auto g = load_graph("v 0 1.0\nv 1 1.0\ne 0 1 1.0\n");
    EXPECT_EQ(g.vertex_count(), 2u);
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.weight(0, 1), 1.0);
}

TEST(GraphIo, CommentsAndLabels) {
    const auto g = load_graph("# header\nv 10 2.5  # heavy\nv 3 1\n\ne 10 3 0.5\n");
    EXPECT_EQ(g.label(0), 3u);
    EXPECT_EQ(g.label(1), 10u);
    EXPECT_EQ(g.mu(g.index_of(10)), 2.5);
    EXPECT_EQ(g.weight(0, 1), 0.5);
}

TEST(GraphIo, Errors) {
    auto kind_of = [](const char* text) {
        try {
            load_graph(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::invalid_argument;
    };
    EXPECT_EQ(kind_of("v 0 1\ne 0 0 1.0\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v 0 1\nv 1 1\ne 0 1 1\ne 1 0 2\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v 0 0\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v 0 1 2\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("x 0 1\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v 0 1\ne 0 1 1\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v 0 abc\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v -1 1\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v 0 1\nv 0 1\n"), ErrorKind::parse_error);
    EXPECT_EQ(kind_of("v 0 1\nv 1 1\ne 0 1 -1\n"), ErrorKind::parse_error);
}

TEST(GraphIo, DuplicateEdgeSameWeightIsAccepted) {
    const auto g = load_graph("v 0 1\nv 1 1\ne 0 1 1\ne 1 0 1\n");
    EXPECT_EQ(g.edge_count(), 1u);
}

TEST(GraphIo, LenientKeepsLoops) {
    const auto g = load_graph("v 0 1\nv 1 1\ne 0 1 1\ne 1 1 1\n", LoadMode::lenient);
    EXPECT_TRUE(validate_graph(g).has(ViolationKind::loop));
}

TEST(GraphIo, RoundTrip) {
    const auto p = generate_path(3);
    EXPECT_TRUE(same_graph(p, load_graph(save_graph(p))));
    EXPECT_EQ(save_graph(p), "v 0 1\nv 1 1\nv 2 1\ne 0 1 1\ne 1 2 1\n");

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = fixtures::random_graph(rng, 40, 60);
        const auto text = save_graph(g);
        const auto back = load_graph(text);
        EXPECT_TRUE(same_graph(g, back));
        EXPECT_EQ(save_graph(back), text);
    }
}

TEST(GraphIo, WriterOrder) {
    const auto g = load_graph("v 5 1\nv 2 1\nv 9 1\ne 9 2 1\ne 5 2 3\n");
    EXPECT_EQ(save_graph(g), "v 2 1\nv 5 1\nv 9 1\ne 2 5 3\ne 2 9 1\n");
}

TEST(Builder, ConflictingArcs) {
    GraphBuilder b;
    b.add_vertex(1.0);
    b.add_vertex(1.0);
    b.add_arc(0, 1, 1.0);
    b.add_arc(0, 1, 2.0);
    EXPECT_THROW(std::move(b).build(), Error);
}

TEST(Builder, UnknownVertex) {
    GraphBuilder b;
    b.add_vertex(1.0);
    EXPECT_THROW(b.add_edge(0, 3, 1.0), Error);
    const auto g = generate_path(3);
    EXPECT_THROW(g.check_vertex(7), Error);
    EXPECT_THROW(g.index_of(42), Error);
}
