#include "snc/split_twin.hpp"

#include <bit>
#include <numeric>
#include <random>
#include <sstream>

namespace snc {

Extension split_twin_extend(const OrientedGraph& g, const SplitTwinSpec& spec) {
    validate(g);
    if (g.n + 1 > kMaxVertices)
        throw std::invalid_argument("split_twin_extend: result would exceed 63 vertices");
    if (spec.x < 0 || spec.x >= g.n)
        throw std::invalid_argument("split_twin_extend: split vertex out of range");
    const std::uint64_t outx = g.out[spec.x];
    if ((spec.a | spec.b) != outx || (spec.a & spec.b) != 0)
        throw std::invalid_argument("split_twin_extend: (A, B) is not a partition of N1+(x)");

    const int twin = g.n;  // x'' index
    Extension ext;
    ext.twin_prime = spec.x;
    ext.twin_second = twin;
    ext.graph.n = g.n + 1;
    for (int u = 0; u < g.n; u++) {
        if (u == spec.x) continue;
        std::uint64_t row = g.out[u];
        if (row & vertex_bit(spec.x)) row |= vertex_bit(twin);  // u->x duplicates to u->x''
        ext.graph.out[u] = row;
    }
    ext.graph.out[spec.x] = spec.a;
    ext.graph.out[twin] = spec.b;

    ext.relabel.resize(g.n);
    std::iota(ext.relabel.begin(), ext.relabel.end(), 0);
    return ext;
}

PreservationRecord check_preservation(const OrientedGraph& g, int v, const SplitTwinSpec& spec) {
    validate(g);
    if (v < 0 || v >= g.n) throw std::invalid_argument("check_preservation: v out of range");
    if (spec.x == v)
        throw std::invalid_argument("check_preservation: hypothesis violation, x = v");
    if (g.out[v] & vertex_bit(spec.x))
        throw std::invalid_argument("check_preservation: hypothesis violation, x in N1+(v)");

    PreservationRecord rec;
    rec.before = vertex_report(g, v);
    if (rec.before.margin < 0)
        throw std::invalid_argument("check_preservation: margin(v) < 0 in the base graph");

    const Extension ext = split_twin_extend(g, spec);
    rec.after = vertex_report(ext.graph, ext.relabel[v]);

    if (rec.after.d1 != rec.before.d1 || rec.after.d2 < rec.before.d2) {
        std::ostringstream msg;
        msg << "preservation failed for v=" << v + 1 << ", x=" << spec.x + 1 << ": d1 "
            << rec.before.d1 << " -> " << rec.after.d1 << ", d2 " << rec.before.d2 << " -> "
            << rec.after.d2 << "\nbase graph:\n"
            << format_graph(g) << "extended graph:\n"
            << format_graph(ext.graph);
        throw CertificateFailure(msg.str());
    }
    return rec;
}

std::uint64_t eligible_split_vertices(const OrientedGraph& g, int v) {
    validate(g);
    if (v < 0 || v >= g.n) throw std::invalid_argument("eligible_split_vertices: v out of range");
    return low_mask(g.n) & ~(g.out[v] | vertex_bit(v));
}

namespace {

int nth_set_bit(std::uint64_t mask, int k) {
    for (int i = 0; i < k; i++) mask &= mask - 1;
    return std::countr_zero(mask);
}

std::string mask_to_list(std::uint64_t mask) {
    if (mask == 0) return "-";
    std::string s;
    for (std::uint64_t m = mask; m; m &= m - 1) {
        if (!s.empty()) s += ",";
        s += std::to_string(std::countr_zero(m) + 1);
    }
    return s;
}

}  // namespace

FamilyResult generate_family(const OrientedGraph& seed, int step_count, const FamilyOptions& opt) {
    validate(seed);
    if (step_count < 0) throw std::invalid_argument("generate_family: negative step count");
    const GraphReport seed_report = graph_report(seed);
    if (seed_report.delta < 0)
        throw std::invalid_argument("generate_family: seed must satisfy delta >= 0");

    const int v = opt.tracked_vertex.value_or(seed_report.witness);
    if (v < 0 || v >= seed.n)
        throw std::invalid_argument("generate_family: tracked vertex out of range");
    if (vertex_report(seed, v).margin < 0)
        throw std::invalid_argument("generate_family: tracked vertex must have margin >= 0");

    FamilyResult result;
    result.seed = seed;
    result.tracked_vertex = v;
    result.status = FamilyStatus::Completed;

    // rng() is used directly so runs are reproducible for a given seed
    std::mt19937_64 rng(opt.rng_seed);
    OrientedGraph g = seed;
    for (int step = 1; step <= step_count; step++) {
        if (g.n + 1 > kMaxVertices) {
            result.status = FamilyStatus::CapacityReached;
            break;
        }
        const std::uint64_t eligible = eligible_split_vertices(g, v);
        if (eligible == 0) {
            result.status = FamilyStatus::Exhausted;
            break;
        }

        SplitTwinSpec spec;
        if (opt.policy == SplitPolicy::FirstEligible) {
            spec.x = std::countr_zero(eligible);
            spec.a = g.out[spec.x];
            spec.b = 0;
        } else {
            const int count = std::popcount(eligible);
            spec.x = nth_set_bit(eligible, static_cast<int>(rng() % count));
            for (std::uint64_t m = g.out[spec.x]; m; m &= m - 1) {
                const std::uint64_t bit = m & ~(m - 1);
                if (rng() & 1)
                    spec.a |= bit;
                else
                    spec.b |= bit;
            }
        }

        Extension ext = split_twin_extend(g, spec);
        const VertexReport after = vertex_report(ext.graph, ext.relabel[v]);
        if (after.margin < 0) {
            std::ostringstream msg;
            msg << "family step " << step << " lost the tracked Seymour vertex v=" << v + 1
                << " (margin " << after.margin << ")\nprevious graph:\n"
                << format_graph(g) << "extended graph:\n"
                << format_graph(ext.graph);
            throw CertificateFailure(msg.str());
        }

        FamilyCertificate cert;
        cert.step = step;
        cert.spec = spec;
        cert.tracked_before = v;
        cert.tracked_after = ext.relabel[v];
        cert.relabel = ext.relabel;
        cert.report_after = after;

        result.steps.push_back({std::move(ext.graph), std::move(cert)});
        g = result.steps.back().graph;
    }
    return result;
}

std::string format_family(const FamilyResult& result) {
    std::string s;
    for (const FamilyStep& step : result.steps) {
        const FamilyCertificate& c = step.certificate;
        s += "step=" + std::to_string(c.step) + " x=" + std::to_string(c.spec.x + 1) +
             " A=" + mask_to_list(c.spec.a) + " B=" + mask_to_list(c.spec.b) +
             " v=" + std::to_string(c.tracked_after + 1) +
             " margin=" + std::to_string(c.report_after.margin) + "\n";
        s += format_graph(step.graph);
        s += "\n";
    }
    return s;
}

}  // namespace snc
