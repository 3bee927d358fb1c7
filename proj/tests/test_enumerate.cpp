#include <doctest.h>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "snc/enumerate.hpp"
#include "snc/graph.hpp"
#include "support.hpp"

using namespace snc;
using tests::oracle_delta;
using tests::oracle_vertex;
using tests::sample_codes;

namespace {

// Counts recomputed per code with fresh decodes and the matrix oracle; the
// sweep must agree although it walks the space incrementally.
struct OracleCounts {
    std::uint64_t examined = 0;
    std::uint64_t skipped = 0;
    std::uint64_t verified = 0;
    std::vector<std::uint64_t> counterexamples;
};

OracleCounts oracle_sweep(int n, std::uint64_t start, std::uint64_t end) {
    OracleCounts c;
    for (std::uint64_t code = start; code < end; ++code) {
        ++c.examined;
        OrientedGraph g = decode(GraphCode(n, code));
        if (!min_outdegree_positive(g)) {
            ++c.skipped;
        } else if (oracle_delta(g) >= 0) {
            ++c.verified;
        } else {
            c.counterexamples.push_back(code);
        }
    }
    return c;
}

// Extremal records recomputed from per-vertex oracle reports.
ExtremalRecord oracle_record(int n, std::uint64_t code) {
    OrientedGraph g = decode(GraphCode(n, code));
    int delta = -n;
    std::uint64_t bn = 0, bd = 1;
    for (int v = 0; v < n; ++v) {
        tests::OracleReport r = oracle_vertex(g, v);
        delta = std::max(delta, r.margin);
        const auto num = static_cast<std::uint64_t>(r.d2);
        const auto den = static_cast<std::uint64_t>(r.d1);
        if (num * bd > bn * den) {
            bn = num;
            bd = den;
        }
    }
    return ExtremalRecord{code, delta, Ratio(bn, bd)};
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("every two-vertex graph has a vertex without out-edges") {
    VerificationReport r = verify_all(2);
    CHECK(r.total == 3);
    CHECK(r.aggregate.total_examined == 3);
    CHECK(r.aggregate.skipped_zero_outdeg == 3);
    CHECK(r.aggregate.verified == 0);
    CHECK(r.aggregate.counterexamples.empty());
}

TEST_CASE("the three-vertex sweep verifies exactly the two triangles") {
    VerifyOptions opt;
    opt.topk_capacity = 2;
    VerificationReport r = verify_all(3, opt);
    CHECK(r.total == 27);
    CHECK(r.aggregate.total_examined == 27);
    CHECK(r.aggregate.skipped_zero_outdeg == 25);
    CHECK(r.aggregate.verified == 2);
    CHECK(r.aggregate.counterexamples.empty());
    REQUIRE(r.aggregate.topk.size() == 2);
    CHECK(r.aggregate.topk[0] == ExtremalRecord{16, 0, Ratio(1, 1)});
    CHECK(r.aggregate.topk[1] == ExtremalRecord{23, 0, Ratio(1, 1)});
}

TEST_CASE("sweep counts match a decode-from-scratch oracle recount") {
    for (int n = 2; n <= 4; ++n) {
        OracleCounts expect = oracle_sweep(n, 0, code_space_size(n));
        VerificationReport r = verify_all(n);
        CHECK(r.aggregate.total_examined == expect.examined);
        CHECK(r.aggregate.skipped_zero_outdeg == expect.skipped);
        CHECK(r.aggregate.verified == expect.verified);
        CHECK(r.aggregate.counterexamples == expect.counterexamples);
    }
    // Random interior windows of the five-vertex space.
    for (std::uint64_t seed_code : sample_codes(5, 12, 0xfeed)) {
        std::uint64_t start = seed_code;
        std::uint64_t end = std::min(start + 1500, code_space_size(5));
        OracleCounts expect = oracle_sweep(5, start, end);
        RangeResult rr = verify_range(EnumerationRange{5, start, end});
        CHECK(rr.total_examined == expect.examined);
        CHECK(rr.skipped_zero_outdeg == expect.skipped);
        CHECK(rr.verified == expect.verified);
        CHECK(rr.counterexamples == expect.counterexamples);
    }
}

TEST_CASE("early-exit and exact-scan modes split the space identically") {
    for (int n = 2; n <= 4; ++n) {
        VerifyOptions fast;  // topk 0: scan may stop at the first good vertex
        VerifyOptions full;
        full.topk_capacity = 3;
        VerificationReport a = verify_all(n, fast);
        VerificationReport b = verify_all(n, full);
        CHECK(a.aggregate.total_examined == b.aggregate.total_examined);
        CHECK(a.aggregate.skipped_zero_outdeg == b.aggregate.skipped_zero_outdeg);
        CHECK(a.aggregate.verified == b.aggregate.verified);
        CHECK(a.aggregate.counterexamples == b.aggregate.counterexamples);
    }
}

TEST_CASE("top-k equals a naive sort over every filter-passing graph") {
    std::vector<ExtremalRecord> expect;
    for (std::uint64_t c = 0; c < code_space_size(4); ++c)
        if (min_outdegree_positive(decode(GraphCode(4, c))))
            expect.push_back(oracle_record(4, c));
    std::sort(expect.begin(), expect.end());

    VerifyOptions opt;
    opt.topk_capacity = 7;
    VerificationReport r = verify_all(4, opt);
    REQUIRE(expect.size() >= 7);
    expect.resize(7);
    CHECK(r.aggregate.topk == expect);

    // Capacity above the candidate count returns everything, still sorted.
    VerifyOptions wide;
    wide.topk_capacity = 100;
    VerificationReport w = verify_all(3, wide);
    REQUIRE(w.aggregate.topk.size() == 2);
    CHECK(w.aggregate.topk[0].code == 16);
    CHECK(w.aggregate.topk[1].code == 23);
}

TEST_CASE("the spot-checked skip bucket never hides a counterexample") {
    // Every graph the filter would skip has delta >= 0 by direct oracle
    // computation: 10^4 random skipped codes across n in 5..9.
    int found = 0;
    for (int n = 5; n <= 9 && found < 10000; ++n)
        for (std::uint64_t c : sample_codes(n, 4000, 0x50f7 + n)) {
            OrientedGraph g = decode(GraphCode(n, c));
            if (min_outdegree_positive(g)) continue;
            CHECK(oracle_delta(g) >= 0);
            if (++found == 10000) break;
        }
    CHECK(found == 10000);
}

TEST_CASE("splitting the three-vertex space at 13 merges back exactly") {
    VerifyOptions opt;
    opt.topk_capacity = 2;
    RangeResult lo = verify_range(EnumerationRange{3, 0, 13}, opt);
    RangeResult hi = verify_range(EnumerationRange{3, 13, 27}, opt);
    CHECK(merge(lo, hi) == verify_range(EnumerationRange{3, 0, 27}, opt));
}

TEST_CASE("merging split ranges reproduces the whole sweep exactly") {
    VerifyOptions opt;
    opt.topk_capacity = 5;
    RangeResult whole = verify_range(EnumerationRange{4, 0, 729}, opt);
    RangeResult a = verify_range(EnumerationRange{4, 0, 100}, opt);
    RangeResult b = verify_range(EnumerationRange{4, 100, 400}, opt);
    RangeResult c = verify_range(EnumerationRange{4, 400, 729}, opt);

    CHECK(merge(merge(a, b), c) == whole);
    CHECK(merge(a, merge(b, c)) == whole);      // associative
    CHECK(merge(merge(b, a), c) == whole);      // commutative
    CHECK(merge(c, merge(a, b)) == whole);

    RangeResult empty = verify_range(EnumerationRange{4, 50, 50}, opt);
    CHECK(merge(whole, empty) == whole);        // identity
    CHECK(merge(empty, whole) == whole);

    CHECK_THROWS_AS(merge(a, verify_range(EnumerationRange{3, 0, 27}, opt)),
                    std::invalid_argument);
    VerifyOptions other;
    other.topk_capacity = 2;
    CHECK_THROWS_AS(merge(a, verify_range(EnumerationRange{4, 0, 10}, other)),
                    std::invalid_argument);
}

TEST_CASE("worker count never changes the reported aggregate") {
    for (int n : {4, 5}) {
        VerifyOptions base;
        base.topk_capacity = 3;
        VerificationReport one = verify_all(n, base);
        std::string one_lines = render_lines(one);
        for (int workers : {2, 8}) {
            VerifyOptions opt = base;
            opt.worker_count = workers;
            VerificationReport r = verify_all(n, opt);
            CHECK(r.aggregate == one.aggregate);
            CHECK(render_lines(r) == one_lines);
        }
    }
}

TEST_CASE("progress events fire every k codes with per-range totals") {
    std::mutex mu;
    std::vector<ProgressEvent> events;
    VerifyOptions opt;
    opt.progress_interval = 10;
    opt.progress = [&](const ProgressEvent& ev) {
        std::lock_guard<std::mutex> lock(mu);
        events.push_back(ev);
    };
    verify_all(3, opt);
    REQUIRE(events.size() == 2);
    CHECK(events[0].processed == 10);
    CHECK(events[1].processed == 20);
    CHECK(events[0].range_start == 0);
    CHECK(events[0].range_end == 27);

    // Two workers: each half reports its own cumulative count.
    events.clear();
    opt.progress_interval = 100;
    opt.worker_count = 2;
    verify_all(4, opt);
    REQUIRE(events.size() == 6);
    std::uint64_t starts[2] = {0, 365};  // 729 splits 365 + 364
    for (std::uint64_t s : starts) {
        std::vector<std::uint64_t> seen;
        for (const auto& ev : events)
            if (ev.range_start == s) seen.push_back(ev.processed);
        CHECK(seen == std::vector<std::uint64_t>{100, 200, 300});
    }
}

TEST_CASE("an external abort halts the sweep at a check boundary") {
    std::atomic<bool> stop{true};
    VerifyOptions opt;
    opt.abort = &stop;
    RangeResult r = verify_range(EnumerationRange{5, 0, 59049}, opt);
    CHECK(r.halted);
    CHECK(r.total_examined == 8192);
    CHECK(r.total_examined ==
          r.skipped_zero_outdeg + r.verified + r.counterexamples.size());

    // Ranges shorter than the check interval finish before noticing.
    RangeResult s = verify_range(EnumerationRange{5, 0, 5000}, opt);
    CHECK(!s.halted);
    CHECK(s.total_examined == 5000);
}

TEST_CASE("fail-fast is inert when no counterexample exists") {
    VerifyOptions opt;
    opt.fail_fast = true;
    opt.worker_count = 2;
    VerificationReport r = verify_all(4, opt);
    CHECK(!r.aggregate.halted);
    CHECK(r.aggregate == verify_all(4).aggregate);
}

TEST_CASE("checkpoint state round-trips through disk unchanged") {
    const std::string path = temp_path("snc_test_roundtrip.ck");
    CheckpointState st;
    st.stride = 30;
    st.range = EnumerationRange{5, 0, 90};
    st.next_code = 60;
    st.partial.n = 5;
    st.partial.topk_capacity = 2;
    st.partial.total_examined = 60;
    st.partial.skipped_zero_outdeg = 50;
    st.partial.verified = 8;
    st.partial.counterexamples = {10, 20};
    st.partial.topk = {ExtremalRecord{7, -1, Ratio(1, 2)},
                       ExtremalRecord{11, 0, Ratio(1, 1)}};
    checkpoint_save(st, path);

    CheckpointState back = checkpoint_load(path);
    CHECK(back.stride == st.stride);
    CHECK(back.range.n == st.range.n);
    CHECK(back.range.start == st.range.start);
    CHECK(back.range.end == st.range.end);
    CHECK(back.next_code == st.next_code);
    CHECK(back.partial == st.partial);
    std::remove(path.c_str());
}

TEST_CASE("an interrupted run resumes to the uninterrupted answer") {
    const std::string path = temp_path("snc_test_resume.ck");
    std::remove(path.c_str());

    VerifyOptions opt;
    opt.topk_capacity = 3;
    opt.worker_count = 2;

    // First session: one 30000-code chunk, then stop.
    verify_resumable(5, opt, path, 30000, 1);
    CheckpointState mid = checkpoint_load(path);
    CHECK(mid.next_code == 30000);
    CHECK(mid.partial.total_examined == 30000);

    // Second session: picks up at 30000 and finishes.
    VerificationReport resumed = verify_resumable(5, opt, path, 30000);
    VerificationReport oneshot = verify_all(5, opt);
    CHECK(resumed.aggregate == oneshot.aggregate);
    CHECK(render_lines(resumed) == render_lines(oneshot));

    // A third call sees a finished checkpoint and just reports it.
    VerificationReport again = verify_resumable(5, opt, path, 30000);
    CHECK(again.aggregate == oneshot.aggregate);
    std::remove(path.c_str());

    // A checkpoint at position zero is equivalent to a fresh run.
    CheckpointState zero;
    zero.stride = 30000;
    zero.range = EnumerationRange{5, 0, 59049};
    zero.next_code = 0;
    zero.partial.n = 5;
    zero.partial.topk_capacity = 3;
    checkpoint_save(zero, path);
    VerificationReport fresh = verify_resumable(5, opt, path, 30000);
    CHECK(fresh.aggregate == oneshot.aggregate);
    CHECK(render_lines(fresh) == render_lines(oneshot));
    std::remove(path.c_str());
}

TEST_CASE("checkpoints reject foreign parameters and corruption") {
    const std::string path = temp_path("snc_test_reject.ck");
    std::remove(path.c_str());

    VerifyOptions opt;
    opt.topk_capacity = 3;
    verify_resumable(5, opt, path, 30000, 1);

    CHECK_THROWS_AS(verify_resumable(5, opt, path, 20000), std::runtime_error);
    VerifyOptions other = opt;
    other.topk_capacity = 1;
    CHECK_THROWS_AS(verify_resumable(5, other, path, 30000), std::runtime_error);
    VerifyOptions ranged = opt;
    ranged.range = EnumerationRange{5, 0, 40000};
    CHECK_THROWS_AS(verify_resumable(5, ranged, path, 30000), std::runtime_error);

    // Flip one byte in the middle: the checksum must catch it.
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(40);
        char b = 0;
        f.seekg(40);
        f.get(b);
        b = static_cast<char>(b ^ 0x40);
        f.seekp(40);
        f.put(b);
    }
    CHECK_THROWS_AS(checkpoint_load(path), std::runtime_error);

    // Truncation and garbage are rejected outright.
    std::ofstream(path, std::ios::binary) << "SNCC";
    CHECK_THROWS_AS(checkpoint_load(path), std::runtime_error);
    std::remove(path.c_str());
    CHECK_THROWS_AS(checkpoint_load(path), std::runtime_error);
}

TEST_CASE("a halted partial result refuses to become a checkpoint") {
    CheckpointState st;
    st.stride = 10;
    st.range = EnumerationRange{5, 0, 90};
    st.next_code = 10;
    st.partial.n = 5;
    st.partial.total_examined = 10;
    st.partial.skipped_zero_outdeg = 10;
    st.partial.halted = true;
    CHECK_THROWS_AS(checkpoint_save(st, temp_path("snc_test_halted.ck")),
                    std::invalid_argument);
}

TEST_CASE("sweep arguments are validated") {
    CHECK_THROWS_AS(verify_range(EnumerationRange{1, 0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(verify_range(EnumerationRange{3, 20, 10}), std::invalid_argument);
    CHECK_THROWS_AS(verify_range(EnumerationRange{3, 0, 28}), std::invalid_argument);
    CHECK_THROWS_AS(verify_all(10), std::invalid_argument);

    VerifyOptions bad_workers;
    bad_workers.worker_count = 0;
    CHECK_THROWS_AS(verify_all(3, bad_workers), std::invalid_argument);

    VerifyOptions mismatched;
    mismatched.range = EnumerationRange{3, 0, 27};
    CHECK_THROWS_AS(verify_all(4, mismatched), std::invalid_argument);

    CHECK_THROWS_AS(verify_resumable(5, VerifyOptions{}, "x", 0), std::invalid_argument);
}

TEST_CASE("machine-readable output carries no timing and is stable") {
    VerifyOptions opt;
    opt.topk_capacity = 2;
    VerificationReport a = verify_all(3, opt);
    VerificationReport b = verify_all(3, opt);
    b.elapsed_seconds = a.elapsed_seconds + 100.0;  // timing must not leak
    CHECK(render_lines(a) == render_lines(b));
    CHECK(render_lines(a) ==
          "summary n=3 range=[0,27) total=27 examined=27 skipped=25 verified=2"
          " counterexamples=0\n"
          "topk rank=1 code=16 delta=0 ratio=1/1\n"
          "topk rank=2 code=23 delta=0 ratio=1/1\n");

    std::string text = render_text(a);
    CHECK(text.find("counterexamples: 0") != std::string::npos);
    CHECK(text.find("elapsed") != std::string::npos);
}
