// Checkpoint file layout: fixed-width little-endian fields, a versioned
// header, then the partial counts, counterexample codes and top-k records,
// and a trailing FNV-1a checksum over everything before it. Any mismatch or
// inconsistency rejects the whole file.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "snc/enumerate.hpp"

namespace snc {

namespace {

constexpr char kMagic[8] = {'S', 'N', 'C', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; i++) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; i++) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    bool need(std::size_t bytes) const { return pos + bytes <= buf.size(); }

    std::uint32_t u32() {
        if (!need(4)) throw std::runtime_error("checkpoint: truncated file");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; i++)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        if (!need(8)) throw std::runtime_error("checkpoint: truncated file");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; i++)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
        return v;
    }
};

std::uint64_t fnv1a(const std::string& data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; i++) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ull;
    }
    return h;
}

void check(bool ok, const char* what) {
    if (!ok) throw std::runtime_error(std::string("checkpoint: ") + what);
}

}  // namespace

void checkpoint_save(const CheckpointState& state, const std::string& path) {
    const RangeResult& p = state.partial;
    if (p.halted)
        throw std::invalid_argument("checkpoint_save: a halted partial result is not resumable");
    std::string buf;
    buf.append(kMagic, sizeof kMagic);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(state.range.n));
    put_u64(buf, p.topk_capacity);
    put_u64(buf, state.stride);
    put_u64(buf, state.range.start);
    put_u64(buf, state.range.end);
    put_u64(buf, state.next_code);
    put_u64(buf, p.total_examined);
    put_u64(buf, p.skipped_zero_outdeg);
    put_u64(buf, p.verified);
    put_u64(buf, p.halted ? 1 : 0);
    put_u64(buf, p.counterexamples.size());
    put_u64(buf, p.topk.size());
    for (const std::uint64_t c : p.counterexamples) put_u64(buf, c);
    for (const ExtremalRecord& r : p.topk) {
        put_u64(buf, r.code);
        put_u64(buf, static_cast<std::uint64_t>(static_cast<std::int64_t>(r.delta)));
        put_u64(buf, r.ratio.num);
        put_u64(buf, r.ratio.den);
    }
    put_u64(buf, fnv1a(buf, buf.size()));

    // write-then-rename so an interrupted save never leaves a half-written file
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("checkpoint: cannot open " + tmp);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!out) throw std::runtime_error("checkpoint: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("checkpoint: rename failed for " + path);
}

CheckpointState checkpoint_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    check(buf.size() >= sizeof kMagic + 4 + 8, "truncated file");
    check(buf.compare(0, sizeof kMagic, kMagic, sizeof kMagic) == 0, "bad magic");
    check(fnv1a(buf, buf.size() - 8) ==
              Reader{buf, buf.size() - 8}.u64(),
          "checksum mismatch");

    Reader rd{buf, sizeof kMagic};
    check(rd.u32() == kVersion, "unsupported version");

    CheckpointState st;
    st.range.n = static_cast<int>(rd.u32());
    check(st.range.n >= 2 && st.range.n <= kMaxCodeVertices, "n out of range");
    st.partial.n = st.range.n;
    st.partial.topk_capacity = rd.u64();
    st.stride = rd.u64();
    st.range.start = rd.u64();
    st.range.end = rd.u64();
    st.next_code = rd.u64();
    st.partial.total_examined = rd.u64();
    st.partial.skipped_zero_outdeg = rd.u64();
    st.partial.verified = rd.u64();
    st.partial.halted = rd.u64() != 0;
    check(!st.partial.halted, "halted run is not resumable");
    const std::uint64_t ce_count = rd.u64();
    const std::uint64_t topk_count = rd.u64();

    const std::uint64_t space = code_space_size(st.range.n);
    check(st.stride >= 1, "zero stride");
    check(st.range.start <= st.range.end && st.range.end <= space, "range out of bounds");
    check(st.next_code >= st.range.start && st.next_code <= st.range.end,
          "resume position outside range");
    check(st.next_code == st.range.end ||
              (st.next_code - st.range.start) % st.stride == 0,
          "resume position not at a stride boundary");
    check(st.partial.total_examined == st.next_code - st.range.start,
          "count does not match resume position");
    check(st.partial.total_examined ==
              st.partial.skipped_zero_outdeg + st.partial.verified + ce_count,
          "inconsistent counts");
    check(topk_count <= st.partial.topk_capacity, "top-k exceeds capacity");

    st.partial.counterexamples.reserve(ce_count);
    for (std::uint64_t i = 0; i < ce_count; i++) {
        const std::uint64_t c = rd.u64();
        check(c < space, "counterexample code out of range");
        check(st.partial.counterexamples.empty() || st.partial.counterexamples.back() < c,
              "counterexamples not strictly ascending");
        st.partial.counterexamples.push_back(c);
    }
    st.partial.topk.reserve(topk_count);
    for (std::uint64_t i = 0; i < topk_count; i++) {
        ExtremalRecord r;
        r.code = rd.u64();
        r.delta = static_cast<int>(static_cast<std::int64_t>(rd.u64()));
        const std::uint64_t num = rd.u64();
        const std::uint64_t den = rd.u64();
        check(den >= 1, "zero ratio denominator");
        r.ratio = Ratio(num, den);
        check(r.code < space, "top-k code out of range");
        check(st.partial.topk.empty() || st.partial.topk.back() < r,
              "top-k not strictly ascending");
        st.partial.topk.push_back(r);
    }
    check(rd.pos == buf.size() - 8, "trailing bytes");
    return st;
}

}  // namespace snc
