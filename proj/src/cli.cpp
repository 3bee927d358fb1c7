#include "snc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snc/enumerate.hpp"
#include "snc/graph.hpp"
#include "snc/split_twin.hpp"

namespace snc::cli {
namespace {

// Checkpointed runs advance in chunks of this many codes; each completed
// chunk is flushed to disk so an interrupted run can resume at the last
// chunk boundary. 2^24 codes is a few seconds of work per flush.
constexpr std::uint64_t kDefaultCheckpointStride = std::uint64_t{1} << 24;

// ---------------------------------------------------------------------------
// progress reporting
// ---------------------------------------------------------------------------

// Serializes progress lines from worker threads and keeps the running
// processed total. Events carry per-range cumulative counts, and concurrent
// workers sweep disjoint ranges, so the overall total is the sum of each
// range's latest count. `offset` seeds the total for resumed runs so the
// line reflects overall position, not just the current session.
class ProgressPrinter {
public:
    ProgressPrinter(std::ostream& err, int n, std::uint64_t of, std::uint64_t offset)
        : err_(err), n_(n), of_(of), processed_(offset),
          start_(std::chrono::steady_clock::now()) {}

    ProgressSink sink() {
        return [this](const ProgressEvent& ev) { emit(ev); };
    }

private:
    void emit(const ProgressEvent& ev) {
        std::lock_guard<std::mutex> lock(mu_);
        std::uint64_t& seen = per_range_[ev.range_start];
        processed_ += ev.processed - seen;
        seen = ev.processed;
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start_;
        err_ << "progress n=" << n_ << " processed=" << processed_
             << " of=" << of_ << " elapsed=" << std::fixed
             << std::setprecision(3) << elapsed.count() << "\n"
             << std::defaultfloat;
    }

    std::ostream& err_;
    int n_;
    std::uint64_t of_;
    std::uint64_t processed_;
    std::map<std::uint64_t, std::uint64_t> per_range_;
    std::chrono::steady_clock::time_point start_;
    std::mutex mu_;
};

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    int n = 0;
    std::uint64_t progress_interval = 0;
    std::uint64_t topk = 0;
    unsigned workers = 1;
    std::vector<std::uint64_t> range;  // empty or {start, end}
    std::string checkpoint_path;
    bool fail_fast = false;
    std::string format = "text";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    VerifyOptions opt;
    opt.topk_capacity = a.topk;
    opt.progress_interval = a.progress_interval;
    opt.worker_count = a.workers;
    opt.fail_fast = a.fail_fast;
    if (!a.range.empty()) {
        if (a.range[0] > a.range[1] || a.range[1] > code_space_size(a.n))
            throw std::invalid_argument("verify: --range must satisfy a <= b <= 3^(n(n-1)/2)");
        opt.range = EnumerationRange{a.n, a.range[0], a.range[1]};
    }

    const EnumerationRange span =
        opt.range ? *opt.range : EnumerationRange{a.n, 0, code_space_size(a.n)};

    std::uint64_t resumed = 0;
    if (!a.checkpoint_path.empty()) {
        // Peek at an existing checkpoint so the progress counter starts at
        // the overall position rather than zero.
        std::ifstream probe(a.checkpoint_path, std::ios::binary);
        if (probe.good()) {
            probe.close();
            CheckpointState st = checkpoint_load(a.checkpoint_path);
            resumed = st.partial.total_examined;
            err << "resuming from checkpoint " << a.checkpoint_path
                << " at code " << st.next_code << "\n";
        }
    }

    ProgressPrinter printer(err, a.n, span.end - span.start, resumed);
    if (a.progress_interval > 0)
        opt.progress = printer.sink();

    VerificationReport report =
        a.checkpoint_path.empty()
            ? verify_all(a.n, opt)
            : verify_resumable(a.n, opt, a.checkpoint_path, kDefaultCheckpointStride);

    if (a.format == "lines")
        out << render_lines(report);
    else
        out << render_text(report);
    return report.aggregate.counterexamples.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// family
// ---------------------------------------------------------------------------

struct FamilyArgs {
    std::string seed;
    int steps = 0;
    std::string policy = "first";
    std::uint64_t rng_seed = 0;
};

// The seed argument names a graph three ways: a path to a file holding the
// canonical text form, the canonical text inline, or the compact `<n>:<code>`
// pair.
OrientedGraph resolve_seed(const std::string& arg) {
    {
        std::ifstream f(arg);
        if (f.good())
            return parse_graph(f);
    }
    if (arg.rfind("n=", 0) == 0)
        return parse_graph(arg);
    auto colon = arg.find(':');
    if (colon != std::string::npos) {
        int n = 0;
        std::uint64_t code = 0;
        try {
            std::size_t used = 0;
            n = std::stoi(arg.substr(0, colon), &used);
            if (used != colon)
                throw std::invalid_argument("trailing characters");
            std::string tail = arg.substr(colon + 1);
            code = std::stoull(tail, &used);
            if (used != tail.size() || tail.empty())
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("family: malformed seed '" + arg + "'");
        }
        return decode(GraphCode(n, code));
    }
    throw std::invalid_argument(
        "family: seed '" + arg +
        "' is not a readable file, an inline 'n=... code=...' graph, or '<n>:<code>'");
}

int cmd_family(const FamilyArgs& a, std::ostream& out, std::ostream& err) {
    OrientedGraph seed = resolve_seed(a.seed);

    FamilyOptions opt;
    opt.policy = a.policy == "random" ? SplitPolicy::SeededRandom
                                      : SplitPolicy::FirstEligible;
    opt.rng_seed = a.rng_seed;

    FamilyResult result = generate_family(seed, a.steps, opt);
    out << format_family(result);

    switch (result.status) {
        case FamilyStatus::Completed:
            break;
        case FamilyStatus::Exhausted:
            err << "family: stopped after " << result.steps.size()
                << " of " << a.steps
                << " steps; tracked vertex has no eligible split left\n";
            break;
        case FamilyStatus::CapacityReached:
            err << "family: stopped after " << result.steps.size()
                << " of " << a.steps << " steps; vertex capacity reached\n";
            break;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// decode
// ---------------------------------------------------------------------------

int cmd_decode(int n, std::uint64_t code, std::ostream& out) {
    OrientedGraph g = decode(GraphCode(n, code));
    out << format_graph(g);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exhaustive second-neighborhood verifier"};
    app.name("snc");
    app.require_subcommand(1);

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand(
        "verify", "exhaustively verify all oriented graphs on n vertices");
    verify->add_option("n", va.n, "number of vertices")
        ->required()
        ->check(CLI::Range(2, 9));
    verify->add_option("--progress", va.progress_interval,
                       "emit a progress line every k graphs examined");
    verify->add_option("--topk", va.topk,
                       "report the m graphs with smallest margin");
    verify->add_option("--workers", va.workers, "worker thread count")
        ->check(CLI::Range(1u, 256u));
    verify->add_option("--range", va.range,
                       "restrict to codes in [a, b)")
        ->expected(2);
    verify->add_option("--checkpoint", va.checkpoint_path,
                       "persist progress to this file and resume from it");
    verify->add_flag("--fail-fast", va.fail_fast,
                     "stop at the first counterexample");
    verify->add_option("--format", va.format, "output format")
        ->check(CLI::IsMember({"text", "lines"}));

    FamilyArgs fa;
    CLI::App* family = app.add_subcommand(
        "family", "grow a certified family by repeated vertex splitting");
    family->add_option("seed-code-or-file", fa.seed,
                       "seed graph: file, inline 'n=... code=...', or <n>:<code>")
        ->required();
    family->add_option("--steps", fa.steps, "number of split steps")
        ->required()
        ->check(CLI::NonNegativeNumber);
    family->add_option("--policy", fa.policy, "split selection policy")
        ->check(CLI::IsMember({"first", "random"}));
    family->add_option("--seed", fa.rng_seed, "RNG seed for --policy random");

    int dn = 0;
    std::uint64_t dcode = 0;
    CLI::App* dec = app.add_subcommand("decode", "print the graph behind a code");
    dec->add_option("n", dn, "number of vertices")->required()->check(CLI::Range(2, 9));
    dec->add_option("code", dcode, "base-3 edge code")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (app.got_subcommand(verify))
            return cmd_verify(va, out, err);
        if (app.got_subcommand(family))
            return cmd_family(fa, out, err);
        return cmd_decode(dn, dcode, out);
    } catch (const CertificateFailure& e) {
        err << "certificate failure: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace snc::cli
