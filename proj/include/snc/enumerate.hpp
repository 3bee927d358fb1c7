// Exhaustive, range-partitionable verification of delta(D) >= 0 over all
// labeled oriented graphs on n vertices.
//
// A range sweep walks the base-3 code space in increasing order with
// incremental digit updates, skips graphs with a zero-outdegree vertex, and
// checks the remainder for a vertex whose new second out-neighborhood is at
// least as large as its out-neighborhood. Results from disjoint ranges merge
// exactly, so any contiguous partition of the space yields the same report.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snc/graph.hpp"

namespace snc {

struct EnumerationRange {
    int n = 0;
    std::uint64_t start = 0;  // inclusive
    std::uint64_t end = 0;    // exclusive, start <= end <= 3^C
};

// One extremal-diagnostic entry: ordered by (delta, ratio, code) ascending,
// code as the final tie-break so the order is total.
struct ExtremalRecord {
    std::uint64_t code = 0;
    int delta = 0;
    Ratio ratio;

    friend bool operator==(const ExtremalRecord&, const ExtremalRecord&) = default;
};

bool operator<(const ExtremalRecord& a, const ExtremalRecord& b);

// Emitted after every progress_interval processed codes; carries the identity
// of the emitting range since events from concurrent workers may interleave.
struct ProgressEvent {
    int n = 0;
    std::uint64_t range_start = 0;
    std::uint64_t range_end = 0;
    std::uint64_t processed = 0;  // codes processed so far in this range
};
using ProgressSink = std::function<void(const ProgressEvent&)>;

// Mergeable statistics for one enumerated range.
struct RangeResult {
    int n = 0;
    std::uint64_t topk_capacity = 0;
    std::uint64_t total_examined = 0;
    std::uint64_t skipped_zero_outdeg = 0;
    std::uint64_t verified = 0;  // min outdegree >= 1 and delta >= 0
    bool halted = false;         // fail-fast stopped the sweep early
    std::vector<std::uint64_t> counterexamples;  // codes with delta < 0, ascending
    std::vector<ExtremalRecord> topk;            // ascending, size <= topk_capacity

    friend bool operator==(const RangeResult&, const RangeResult&) = default;
};

struct VerifyOptions {
    std::uint64_t topk_capacity = 0;     // m; 0 disables extremal tracking
    std::uint64_t progress_interval = 0; // k; 0 disables progress events
    int worker_count = 1;                // used by verify_all / verify_resumable
    bool fail_fast = false;              // halt at the first counterexample
    std::optional<EnumerationRange> range;  // verify_all: override the full range
    ProgressSink progress;               // may be invoked from worker threads
    std::atomic<bool>* abort = nullptr;  // optional external stop request
};

// Decodes every code in [start, end) exactly once. Graphs failing the
// positive-outdegree filter are counted as skipped and contribute nothing to
// the top-k list; the rest are verified or recorded as counterexamples.
RangeResult verify_range(const EnumerationRange& range, const VerifyOptions& opt = {});

// Exact combination of results from disjoint ranges of the same n and the
// same top-k capacity: counts sum, counterexamples concatenate and sort, and
// the merged top-k keeps the capacity smallest records. Associative and
// commutative.
RangeResult merge(const RangeResult& a, const RangeResult& b);

struct VerificationReport {
    int n = 0;
    std::uint64_t total = 0;  // 3^C, the whole code space for n
    std::uint64_t range_start = 0;
    std::uint64_t range_end = 0;
    RangeResult aggregate;
    // Diagnostics only; never part of any correctness contract.
    double elapsed_seconds = 0.0;
    double rate_processed = 0.0;  // codes per second, skipped included
    double rate_filtered = 0.0;   // graphs past the outdegree filter per second
};

// Partitions the range into worker_count contiguous subranges, sweeps them
// (concurrently when worker_count > 1), and merges in fixed range order.
// The aggregate is bit-identical regardless of worker_count.
VerificationReport verify_all(int n, const VerifyOptions& opt = {});

// --- checkpointing -------------------------------------------------------

struct CheckpointState {
    std::uint64_t stride = 0;
    EnumerationRange range;      // the full target range of the run
    std::uint64_t next_code = 0; // range.start + i*stride, or range.end
    RangeResult partial;         // result over [range.start, next_code)
};

// Fixed-width little-endian binary layout with a versioned header and a
// trailing checksum. Loading rejects any mismatch or corruption outright.
void checkpoint_save(const CheckpointState& state, const std::string& path);
CheckpointState checkpoint_load(const std::string& path);

// Sweeps the range in stride-sized chunks, saving a checkpoint after each.
// When `path` holds a checkpoint it must match (n, capacity, stride, range)
// exactly and the sweep resumes from its saved position. Stops early after
// max_chunks chunks; resuming later completes the run with a report equal to
// an uninterrupted one.
VerificationReport verify_resumable(int n, const VerifyOptions& opt, const std::string& path,
                                    std::uint64_t stride,
                                    std::uint64_t max_chunks = UINT64_MAX);

// Line-delimited machine-readable records: a summary line, one line per
// top-k entry, one per counterexample. Contains no timing fields, so equal
// aggregates render byte-identically.
std::string render_lines(const VerificationReport& report);

// Human-readable report including the timing diagnostics.
std::string render_text(const VerificationReport& report);

}  // namespace snc
