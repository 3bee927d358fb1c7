#include "snc/enumerate.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace snc {

bool operator<(const ExtremalRecord& a, const ExtremalRecord& b) {
    if (a.delta != b.delta) return a.delta < b.delta;
    if (!(a.ratio == b.ratio)) return a.ratio < b.ratio;
    return a.code < b.code;
}

namespace {

// Walks the code space by base-3 digit increment, keeping the out-masks and
// the count of zero-outdegree vertices in sync with the current code.
// Equivalent to decode-from-scratch at every position.
struct Stepper {
    int n = 0;
    int npairs = 0;
    std::array<std::uint8_t, 36> digit{};
    std::array<std::uint8_t, 36> pi{}, pj{};  // position -> pair (i, j), i < j
    OrientedGraph g;
    int zero_outdeg = 0;

    Stepper(int n_, std::uint64_t code) : n(n_), npairs(pair_count(n_)) {
        int pos = 0;
        for (int i = 0; i < n; i++)
            for (int j = i + 1; j < n; j++) {
                pi[pos] = static_cast<std::uint8_t>(i);
                pj[pos] = static_cast<std::uint8_t>(j);
                pos++;
            }
        g = decode(GraphCode(n, code));
        std::uint64_t idx = code;
        for (int p = 0; p < npairs; p++) {
            digit[p] = static_cast<std::uint8_t>(idx % 3);
            idx /= 3;
        }
        for (int v = 0; v < n; v++)
            if (g.out[v] == 0) zero_outdeg++;
    }

    void add_edge(int u, int v) {
        if (g.out[u] == 0) zero_outdeg--;
        g.out[u] |= vertex_bit(v);
    }

    void remove_edge(int u, int v) {
        g.out[u] &= ~vertex_bit(v);
        if (g.out[u] == 0) zero_outdeg++;
    }

    // Caller must not advance past the last code of the space.
    void advance() {
        int pos = 0;
        for (;;) {
            const int i = pi[pos], j = pj[pos];
            switch (digit[pos]) {
                case 0:
                    digit[pos] = 1;
                    add_edge(i, j);
                    return;
                case 1:
                    digit[pos] = 2;
                    remove_edge(i, j);
                    add_edge(j, i);
                    return;
                default:  // carry
                    digit[pos] = 0;
                    remove_edge(j, i);
                    pos++;
            }
        }
    }
};

// Keeps the `cap` smallest records seen; the current worst sits on top.
class BoundedTopk {
  public:
    explicit BoundedTopk(std::uint64_t cap) : cap_(cap) { heap_.reserve(cap < 4096 ? cap : 4096); }

    void offer(const ExtremalRecord& rec) {
        if (cap_ == 0) return;
        if (heap_.size() < cap_) {
            heap_.push_back(rec);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (rec < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = rec;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    std::vector<ExtremalRecord> take_sorted() {
        std::sort(heap_.begin(), heap_.end());
        return std::move(heap_);
    }

  private:
    std::uint64_t cap_;
    std::vector<ExtremalRecord> heap_;
};

constexpr std::uint64_t kAbortCheckStride = 8192;

}  // namespace

RangeResult verify_range(const EnumerationRange& range, const VerifyOptions& opt) {
    if (range.n < 2 || range.n > kMaxCodeVertices)
        throw std::invalid_argument("verify_range: n must be in [2,9]");
    const std::uint64_t space = code_space_size(range.n);
    if (range.start > range.end || range.end > space)
        throw std::invalid_argument("verify_range: range exceeds the code space");

    RangeResult res;
    res.n = range.n;
    res.topk_capacity = opt.topk_capacity;
    if (range.start == range.end) return res;

    const int n = range.n;
    const std::uint64_t k = opt.progress_interval;
    BoundedTopk topk(opt.topk_capacity);
    Stepper st(n, range.start);

    std::uint64_t until_progress = k == 0 ? UINT64_MAX : k;
    std::uint64_t until_abort_check = kAbortCheckStride;

    for (std::uint64_t code = range.start; code < range.end; ++code) {
        res.total_examined++;
        if (st.zero_outdeg != 0) {
            res.skipped_zero_outdeg++;
        } else if (opt.topk_capacity == 0) {
            // counterexample status alone: stop at the first Seymour vertex
            bool seymour = false;
            for (int v = 0; v < n; v++) {
                const std::uint64_t first = st.g.out[v];
                std::uint64_t reach2 = 0;
                for (std::uint64_t m = first; m; m &= m - 1)
                    reach2 |= st.g.out[std::countr_zero(m)];
                const std::uint64_t second = reach2 & ~(first | vertex_bit(v));
                if (std::popcount(second) >= std::popcount(first)) {
                    seymour = true;
                    break;
                }
            }
            if (seymour) {
                res.verified++;
            } else {
                res.counterexamples.push_back(code);
                if (opt.fail_fast) {
                    res.halted = true;
                    if (opt.abort) opt.abort->store(true, std::memory_order_relaxed);
                    break;
                }
            }
        } else {
            // exact delta and ratio needed for the extremal record
            int delta = -n;
            std::uint64_t rnum = 0, rden = 1;
            for (int v = 0; v < n; v++) {
                const std::uint64_t first = st.g.out[v];
                std::uint64_t reach2 = 0;
                for (std::uint64_t m = first; m; m &= m - 1)
                    reach2 |= st.g.out[std::countr_zero(m)];
                const std::uint64_t second = reach2 & ~(first | vertex_bit(v));
                const int d1 = std::popcount(first);
                const int d2 = std::popcount(second);
                if (d2 - d1 > delta) delta = d2 - d1;
                const auto num = static_cast<std::uint64_t>(d2);
                const auto den = static_cast<std::uint64_t>(d1);  // >= 1 past the filter
                if (num * rden > rnum * den) {
                    rnum = num;
                    rden = den;
                }
            }
            ExtremalRecord rec{code, delta, Ratio(rnum, rden)};
            topk.offer(rec);
            if (delta >= 0) {
                res.verified++;
            } else {
                res.counterexamples.push_back(code);
                if (opt.fail_fast) {
                    res.halted = true;
                    if (opt.abort) opt.abort->store(true, std::memory_order_relaxed);
                    break;
                }
            }
        }

        if (--until_progress == 0) {
            until_progress = k;
            if (opt.progress)
                opt.progress({n, range.start, range.end, code - range.start + 1});
        }
        if (--until_abort_check == 0) {
            until_abort_check = kAbortCheckStride;
            if (opt.abort && opt.abort->load(std::memory_order_relaxed)) {
                res.halted = true;
                break;
            }
        }
        if (code + 1 < range.end) st.advance();
    }

    res.topk = topk.take_sorted();
    return res;
}

RangeResult merge(const RangeResult& a, const RangeResult& b) {
    if (a.n != b.n) throw std::invalid_argument("merge: mismatched n");
    if (a.topk_capacity != b.topk_capacity)
        throw std::invalid_argument("merge: mismatched topk capacity");

    RangeResult r;
    r.n = a.n;
    r.topk_capacity = a.topk_capacity;
    r.total_examined = a.total_examined + b.total_examined;
    r.skipped_zero_outdeg = a.skipped_zero_outdeg + b.skipped_zero_outdeg;
    r.verified = a.verified + b.verified;
    r.halted = a.halted || b.halted;

    r.counterexamples.reserve(a.counterexamples.size() + b.counterexamples.size());
    std::merge(a.counterexamples.begin(), a.counterexamples.end(), b.counterexamples.begin(),
               b.counterexamples.end(), std::back_inserter(r.counterexamples));

    r.topk.reserve(a.topk.size() + b.topk.size());
    std::merge(a.topk.begin(), a.topk.end(), b.topk.begin(), b.topk.end(),
               std::back_inserter(r.topk));
    if (r.topk.size() > r.topk_capacity) r.topk.resize(r.topk_capacity);
    return r;
}

namespace internal {

// Shared by verify_all and the checkpointed runner: split `range` into
// worker_count contiguous pieces, sweep, merge in range order.
RangeResult run_partitioned(const EnumerationRange& range, const VerifyOptions& opt) {
    const int workers = opt.worker_count;
    if (workers < 1) throw std::invalid_argument("worker_count must be >= 1");

    std::atomic<bool> abort{false};
    VerifyOptions wopt = opt;
    if (opt.fail_fast && opt.abort == nullptr) wopt.abort = &abort;

    const std::uint64_t size = range.end - range.start;
    if (workers == 1 || size < static_cast<std::uint64_t>(workers))
        return verify_range(range, wopt);

    const std::uint64_t q = size / workers;
    const std::uint64_t rem = size % workers;
    std::vector<EnumerationRange> parts;
    parts.reserve(workers);
    std::uint64_t at = range.start;
    for (int w = 0; w < workers; w++) {
        const std::uint64_t len = q + (static_cast<std::uint64_t>(w) < rem ? 1 : 0);
        parts.push_back({range.n, at, at + len});
        at += len;
    }

    std::vector<RangeResult> results(parts.size());
    std::vector<std::exception_ptr> errors(parts.size());
    std::vector<std::thread> pool;
    pool.reserve(parts.size());
    for (std::size_t w = 0; w < parts.size(); w++) {
        pool.emplace_back([&, w] {
            try {
                results[w] = verify_range(parts[w], wopt);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RangeResult acc = results[0];
    for (std::size_t w = 1; w < results.size(); w++) acc = merge(acc, results[w]);
    return acc;
}

}  // namespace internal

VerificationReport verify_all(int n, const VerifyOptions& opt) {
    if (n < 2 || n > kMaxCodeVertices)
        throw std::invalid_argument("verify_all: n must be in [2,9]");
    const std::uint64_t space = code_space_size(n);
    EnumerationRange range{n, 0, space};
    if (opt.range) {
        range = *opt.range;
        if (range.n != n) throw std::invalid_argument("verify_all: range n mismatch");
    }

    const auto t0 = std::chrono::steady_clock::now();
    RangeResult agg = internal::run_partitioned(range, opt);
    const auto t1 = std::chrono::steady_clock::now();

    VerificationReport rep;
    rep.n = n;
    rep.total = space;
    rep.range_start = range.start;
    rep.range_end = range.end;
    rep.aggregate = std::move(agg);
    rep.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
    if (rep.elapsed_seconds > 0) {
        rep.rate_processed = static_cast<double>(rep.aggregate.total_examined) / rep.elapsed_seconds;
        rep.rate_filtered =
            static_cast<double>(rep.aggregate.total_examined - rep.aggregate.skipped_zero_outdeg) /
            rep.elapsed_seconds;
    }
    return rep;
}

VerificationReport verify_resumable(int n, const VerifyOptions& opt, const std::string& path,
                                    std::uint64_t stride, std::uint64_t max_chunks) {
    if (n < 2 || n > kMaxCodeVertices)
        throw std::invalid_argument("verify_resumable: n must be in [2,9]");
    if (stride == 0) throw std::invalid_argument("verify_resumable: stride must be >= 1");
    const std::uint64_t space = code_space_size(n);
    EnumerationRange range{n, 0, space};
    if (opt.range) {
        range = *opt.range;
        if (range.n != n) throw std::invalid_argument("verify_resumable: range n mismatch");
    }

    CheckpointState st;
    if (std::ifstream probe(path, std::ios::binary); probe.good()) {
        st = checkpoint_load(path);
        if (st.range.n != n || st.partial.topk_capacity != opt.topk_capacity ||
            st.stride != stride || st.range.start != range.start || st.range.end != range.end)
            throw std::runtime_error(
                "verify_resumable: checkpoint does not match the requested run");
    } else {
        st.stride = stride;
        st.range = range;
        st.next_code = range.start;
        st.partial.n = n;
        st.partial.topk_capacity = opt.topk_capacity;
    }

    const std::uint64_t resumed_examined = st.partial.total_examined;
    const std::uint64_t resumed_skipped = st.partial.skipped_zero_outdeg;

    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t chunks_done = 0;
    while (st.next_code < range.end && chunks_done < max_chunks) {
        const std::uint64_t chunk_end = std::min(st.next_code + stride, range.end);
        const RangeResult part =
            internal::run_partitioned({n, st.next_code, chunk_end}, opt);
        st.partial = merge(st.partial, part);
        if (st.partial.halted) break;  // fail-fast stop is not a resumable state
        st.next_code = chunk_end;
        checkpoint_save(st, path);
        chunks_done++;
    }
    const auto t1 = std::chrono::steady_clock::now();

    VerificationReport rep;
    rep.n = n;
    rep.total = space;
    rep.range_start = range.start;
    rep.range_end = range.end;
    rep.aggregate = std::move(st.partial);
    rep.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
    if (rep.elapsed_seconds > 0) {
        // rates cover only the codes swept by this session, not the resumed prefix
        const std::uint64_t examined = rep.aggregate.total_examined - resumed_examined;
        const std::uint64_t skipped = rep.aggregate.skipped_zero_outdeg - resumed_skipped;
        rep.rate_processed = static_cast<double>(examined) / rep.elapsed_seconds;
        rep.rate_filtered = static_cast<double>(examined - skipped) / rep.elapsed_seconds;
    }
    return rep;
}

std::string render_lines(const VerificationReport& rep) {
    std::ostringstream out;
    const RangeResult& a = rep.aggregate;
    out << "summary n=" << rep.n << " range=[" << rep.range_start << "," << rep.range_end << ")"
        << " total=" << rep.total << " examined=" << a.total_examined
        << " skipped=" << a.skipped_zero_outdeg << " verified=" << a.verified
        << " counterexamples=" << a.counterexamples.size();
    if (a.halted) out << " halted=1";
    out << "\n";
    for (std::size_t i = 0; i < a.topk.size(); i++) {
        const ExtremalRecord& r = a.topk[i];
        out << "topk rank=" << i + 1 << " code=" << r.code << " delta=" << r.delta
            << " ratio=" << r.ratio.num << "/" << r.ratio.den << "\n";
    }
    for (const std::uint64_t c : a.counterexamples) out << "counterexample code=" << c << "\n";
    return out.str();
}

std::string render_text(const VerificationReport& rep) {
    std::ostringstream out;
    const RangeResult& a = rep.aggregate;
    out << "second neighborhood verification, n=" << rep.n << "\n";
    out << "code space: " << rep.total << " graphs";
    if (rep.range_start != 0 || rep.range_end != rep.total)
        out << ", restricted to [" << rep.range_start << "," << rep.range_end << ")";
    out << "\n";
    out << "examined:        " << a.total_examined << "\n";
    out << "skipped (outdegree-zero vertex): " << a.skipped_zero_outdeg << "\n";
    out << "verified delta >= 0:             " << a.verified << "\n";
    out << "counterexamples: " << a.counterexamples.size() << "\n";
    if (a.halted) out << "halted at the first counterexample (fail-fast)\n";
    out << std::fixed;
    out.precision(3);
    out << "elapsed: " << rep.elapsed_seconds << " s";
    out.precision(0);
    out << " (" << rep.rate_processed << " codes/s, " << rep.rate_filtered
        << " filtered graphs/s)\n";
    if (!a.topk.empty()) {
        out << "most extremal records (delta, ratio, code):\n";
        for (std::size_t i = 0; i < a.topk.size(); i++) {
            const ExtremalRecord& r = a.topk[i];
            out << "  " << i + 1 << ". delta=" << r.delta << " ratio=" << to_string(r.ratio)
                << " code=" << r.code << "\n";
        }
    }
    if (!a.counterexamples.empty()) {
        out << "counterexample graphs:\n";
        for (const std::uint64_t c : a.counterexamples)
            out << format_graph(decode(GraphCode(rep.n, c))) << "\n";
    } else {
        out << "result: every examined graph satisfies delta >= 0\n";
    }
    return out.str();
}

}  // namespace snc
