// Split-twin extension: replace a vertex x by twins x' and x'' that both
// inherit every in-edge of x while the out-edges of x are partitioned
// between them, with no edge between the twins. The extension preserves
// margin(v) >= 0 at any vertex v with x outside {v} u N1+(v), which yields
// certified families of arbitrarily large order from any seed with
// delta >= 0.
//
// Relabeling convention: x' keeps the old index x, x'' takes the new highest
// index, and every other vertex keeps its index.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snc/graph.hpp"

namespace snc {

// The vertex to split and the partition (possibly empty parts) of its
// out-neighborhood.
struct SplitTwinSpec {
    int x = 0;
    std::uint64_t a = 0;  // out-edges kept by x'
    std::uint64_t b = 0;  // out-edges taken by x''

    friend bool operator==(const SplitTwinSpec&, const SplitTwinSpec&) = default;
};

struct Extension {
    OrientedGraph graph;       // n+1 vertices
    std::vector<int> relabel;  // old index -> new index (identity here)
    int twin_prime = 0;        // x', at the old index of x
    int twin_second = 0;       // x'', at index old n
};

// Thrown when a re-verified margin drops below zero or a preservation fact
// fails: either an implementation bug or a refutation of the preservation
// property, so it must never be swallowed. The message carries the full
// graph dump.
struct CertificateFailure : std::logic_error {
    explicit CertificateFailure(const std::string& what) : std::logic_error(what) {}
};

Extension split_twin_extend(const OrientedGraph& g, const SplitTwinSpec& spec);

struct PreservationRecord {
    VertexReport before;  // v in g
    VertexReport after;   // v's image in the extension
};

// Applies the extension and checks the preservation facts for v:
// |N1+(v)| unchanged and |N2+(v)| not decreased. Requires v != x,
// x not in N1+(v), and margin(v) >= 0; rejects inputs where they fail.
// Throws CertificateFailure if a preservation fact does not hold.
PreservationRecord check_preservation(const OrientedGraph& g, int v, const SplitTwinSpec& spec);

// Bitmask of vertices x eligible as split points while tracking v:
// x != v and x not in N1+(v).
std::uint64_t eligible_split_vertices(const OrientedGraph& g, int v);

enum class SplitPolicy {
    FirstEligible,  // smallest eligible x, A = N1+(x), B = empty
    SeededRandom,   // uniform eligible x, uniform partition
};

enum class FamilyStatus {
    Completed,        // all requested steps applied
    Exhausted,        // no eligible split vertex remained
    CapacityReached,  // the next extension would exceed 63 vertices
};

struct FamilyOptions {
    SplitPolicy policy = SplitPolicy::FirstEligible;
    std::uint64_t rng_seed = 0;
    // Vertex to track; defaults to the graph_report witness of the seed.
    // Must satisfy margin >= 0 in the seed.
    std::optional<int> tracked_vertex;
};

struct FamilyCertificate {
    int step = 0;  // 1-based
    SplitTwinSpec spec;
    int tracked_before = 0;
    int tracked_after = 0;
    std::vector<int> relabel;
    VertexReport report_after;  // margin >= 0, re-checked by direct computation
};

struct FamilyStep {
    OrientedGraph graph;
    FamilyCertificate certificate;
};

struct FamilyResult {
    OrientedGraph seed;
    int tracked_vertex = 0;
    std::vector<FamilyStep> steps;
    FamilyStatus status = FamilyStatus::Completed;
};

// Applies step_count extensions, re-verifying the tracked vertex after each;
// a failed re-verification throws CertificateFailure. Stops early with the
// corresponding status when no eligible vertex remains or the vertex
// capacity would be exceeded.
FamilyResult generate_family(const OrientedGraph& seed, int step_count,
                             const FamilyOptions& opt = {});

// One certificate line per step,
// "step=<i> x=<1-based> A=<list> B=<list> v=<1-based> margin=<int>",
// each followed by the canonical text of the extended graph and a blank
// line. Lists are comma-separated 1-based vertices, "-" when empty.
std::string format_family(const FamilyResult& result);

}  // namespace snc
