// Core representation of labeled oriented graphs and their second
// neighborhood quantities.
//
// Conventions used throughout:
//   - vertices are 0-based indices; bit v of a mask is vertex v (LSB = vertex 0)
//   - user-facing text is 1-based
//   - a graph on n vertices is indexed by an integer code in [0, 3^C),
//     C = n(n-1)/2, whose base-3 digits give the state of each vertex pair:
//     0 = no edge, 1 = i->j, 2 = j->i for the pair (i, j), i < j.
//     Pairs are ordered lexicographically, (0,1) = position 0, and position k
//     holds the coefficient of 3^k.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace snc {

// Bitsets are one machine word; bit 63 is never used.
inline constexpr int kMaxVertices = 63;
// 3^C fits in 64 bits through n = 9 (3^36); n = 10 would need 3^45 > 2^64.
inline constexpr int kMaxCodeVertices = 9;

constexpr int pair_count(int n) { return n * (n - 1) / 2; }

std::uint64_t pow3(int e);

// Number of labeled oriented graphs on n vertices, 3^pair_count(n).
std::uint64_t code_space_size(int n);

constexpr std::uint64_t vertex_bit(int v) { return std::uint64_t{1} << v; }
constexpr std::uint64_t low_mask(int n) { return (std::uint64_t{1} << n) - 1; }

// Index into the base-3 space of labeled oriented graphs on n vertices.
struct GraphCode {
    int n = 0;
    std::uint64_t index = 0;

    GraphCode() = default;
    GraphCode(int n, std::uint64_t index);  // throws on n or index out of range

    friend bool operator==(const GraphCode&, const GraphCode&) = default;
};

// out[v] is the out-neighborhood bitmask of vertex v. Entries at and above
// n, and bits at and above n within each entry, are zero.
struct OrientedGraph {
    int n = 0;
    std::array<std::uint64_t, kMaxVertices> out{};

    friend bool operator==(const OrientedGraph&, const OrientedGraph&) = default;
};

// Checks the oriented-graph invariants: 2 <= n <= 63, no self-loops, no pair
// of oppositely oriented edges, no bits outside [0, n).
bool is_valid(const OrientedGraph& g);
void validate(const OrientedGraph& g);  // throws std::invalid_argument when not

OrientedGraph decode(const GraphCode& code);
GraphCode encode(const OrientedGraph& g);  // n <= 9 only

std::uint64_t out_neighborhood(const OrientedGraph& g, int v);

// U(v) \ (N1+(v) u {v}) where U(v) is the union of out[u] over u in out[v]:
// the vertices reachable by a directed path of length two that are neither
// out-neighbors of v nor v itself.
std::uint64_t second_out_neighborhood(const OrientedGraph& g, int v);

// Exact non-negative rational, gcd-reduced, denominator >= 1.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Ratio() = default;
    Ratio(std::uint64_t num, std::uint64_t den);  // reduces; throws on den = 0

    friend bool operator==(const Ratio&, const Ratio&) = default;
};

// Value order; safe for the small magnitudes arising here (num, den <= 62).
bool operator<(const Ratio& a, const Ratio& b);

std::string to_string(const Ratio& r);

struct VertexReport {
    int v = 0;
    int d1 = 0;      // |N1+(v)|
    int d2 = 0;      // |N2+(v)|
    int margin = 0;  // d2 - d1
};

VertexReport vertex_report(const OrientedGraph& g, int v);

struct GraphReport {
    int delta = 0;    // max margin over all vertices
    int witness = 0;  // least vertex index attaining delta
    // Max over vertices with d1 >= 1 of d2/d1; meaningful only for graphs
    // with min outdegree >= 1 (0/1 when no vertex qualifies).
    Ratio ratio;
    int min_outdeg = 0;
};

GraphReport graph_report(const OrientedGraph& g);

// True iff every vertex has at least one outgoing edge.
bool min_outdegree_positive(const OrientedGraph& g);

// Canonical text form: "n=<n> code=<decimal>" then one "u->v" line per edge,
// 1-based, ordered by source then target. Graphs on more than 9 vertices have
// no 64-bit code; they are written as "code=-" and carry the edge list alone.
std::string format_graph(const OrientedGraph& g);

// Parses one canonical text block (up to a blank line or EOF). A numeric code
// is decoded and any edge lines must match it exactly; "code=-" requires the
// edge list. Throws std::invalid_argument on malformed or inconsistent input.
OrientedGraph parse_graph(std::istream& in);
OrientedGraph parse_graph(const std::string& text);

}  // namespace snc
