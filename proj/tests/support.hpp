#pragma once

// Shared fixtures for the unit tests and the acceptance runner.

#include <cstdint>
#include <random>
#include <vector>

#include "wavegraph/graph.hpp"

namespace wavegraph::fixtures {

/// Connected graph with random masses and conductances: a random spanning
/// tree plus `extra` random chords.
inline WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra) {
    std::uniform_real_distribution<double> mass(0.1, 5.0), conductance(0.05, 3.0);
    GraphBuilder b;
    for (std::size_t k = 0; k < n; ++k) b.add_vertex(mass(rng));
    std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
    for (std::size_t k = 1; k < n; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        const std::size_t parent = pick(rng);
        b.add_edge(k, parent, conductance(rng));
        used[k][parent] = used[parent][k] = true;
    }
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    for (std::size_t e = 0; e < extra; ++e) {
        const std::size_t a = any(rng), c = any(rng);
        if (a == c || used[a][c]) continue;
        used[a][c] = used[c][a] = true;
        b.add_edge(a, c, conductance(rng));
    }
    return std::move(b).build();
}

/// Brute-force double loop over a dense weight matrix.
inline VertexFunction dense_laplacian(const WeightedGraph& g, const VertexFunction& f) {
    const std::size_t n = g.vertex_count();
    std::vector<double> w(n * n, 0.0);
    for (VertexId x = 0; x < n; ++x) {
        const auto nbr = g.neighbors(x);
        const auto wt = g.weights(x);
        for (std::size_t k = 0; k < nbr.size(); ++k) w[x * n + nbr[k]] = wt[k];
    }
    VertexFunction out(n, 0.0);
    for (VertexId x = 0; x < n; ++x) {
        double acc = 0.0;
        for (VertexId y = 0; y < n; ++y) acc += w[x * n + y] * (f[y] - f[x]);
        out[x] = acc / g.mu(x);
    }
    return out;
}

inline VertexFunction random_function(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    VertexFunction f(n);
    for (double& v : f) v = value(rng);
    return f;
}

} // namespace wavegraph::fixtures
