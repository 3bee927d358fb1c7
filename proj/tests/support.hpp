// Test-only helpers. The oracle recomputes every neighborhood quantity from
// an explicit adjacency matrix with nested loops, sharing no code with the
// bitmask implementation, so a bug there cannot hide in its own mirror.

#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "snc/graph.hpp"

namespace snc::tests {

using Matrix = std::vector<std::vector<int>>;

inline Matrix adjacency(const OrientedGraph& g) {
    Matrix a(g.n, std::vector<int>(g.n, 0));
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v)
            if (g.out[u] >> v & 1) a[u][v] = 1;
    return a;
}

struct OracleReport {
    int d1 = 0;
    int d2 = 0;
    int margin = 0;
};

// |N1+|, |N2+| and the margin of v, from the matrix alone: w lies in N2+(v)
// iff some out-neighbor u of v has an edge to w, w is not an out-neighbor of
// v, and w != v.
inline OracleReport oracle_vertex(const OrientedGraph& g, int v) {
    const Matrix a = adjacency(g);
    OracleReport r;
    std::vector<int> second(g.n, 0);
    for (int u = 0; u < g.n; ++u) {
        if (!a[v][u]) continue;
        ++r.d1;
        for (int w = 0; w < g.n; ++w)
            if (a[u][w] && w != v && !a[v][w]) second[w] = 1;
    }
    r.d2 = std::accumulate(second.begin(), second.end(), 0);
    r.margin = r.d2 - r.d1;
    return r;
}

inline int oracle_delta(const OrientedGraph& g) {
    int best = oracle_vertex(g, 0).margin;
    for (int v = 1; v < g.n; ++v)
        best = std::max(best, oracle_vertex(g, v).margin);
    return best;
}

// Integer matrix product, the textbook way.
inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const int n = static_cast<int>(a.size());
    Matrix c(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

// Second out-neighborhood as a bitmask via matrix squaring: (A^2)[v][w] > 0
// marks a two-step walk, then out-neighbors of v and v itself are removed.
inline std::uint64_t oracle_second_mask(const OrientedGraph& g, int v) {
    const Matrix a = adjacency(g);
    const Matrix a2 = multiply(a, a);
    std::uint64_t mask = 0;
    for (int w = 0; w < g.n; ++w)
        if (a2[v][w] > 0 && !a[v][w] && w != v) mask |= vertex_bit(w);
    return mask;
}

// Builds a graph from explicit 0-based edges, bypassing the code machinery.
inline OrientedGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
    OrientedGraph g;
    g.n = n;
    for (auto [u, v] : edges) g.out[u] |= vertex_bit(v);
    return g;
}

// Applies the vertex permutation perm (new label of u is perm[u]).
inline OrientedGraph relabel(const OrientedGraph& g, const std::vector<int>& perm) {
    OrientedGraph h;
    h.n = g.n;
    for (int u = 0; u < g.n; ++u) {
        std::uint64_t m = 0;
        for (int v = 0; v < g.n; ++v)
            if (g.out[u] >> v & 1) m |= vertex_bit(perm[v]);
        h.out[perm[u]] = m;
    }
    return h;
}

// Deterministic code sample for n; duplicates are fine.
inline std::vector<std::uint64_t> sample_codes(int n, std::size_t count,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::uint64_t space = code_space_size(n);
    std::vector<std::uint64_t> codes(count);
    for (auto& c : codes) c = rng() % space;
    return codes;
}

}  // namespace snc::tests
