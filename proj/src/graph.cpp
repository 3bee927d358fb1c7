#include "snc/graph.hpp"

#include <bit>
#include <cassert>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace snc {

std::uint64_t pow3(int e) {
    if (e < 0 || e > 40) throw std::invalid_argument("pow3: exponent out of range");
    std::uint64_t r = 1;
    for (int i = 0; i < e; i++) r *= 3;
    return r;
}

std::uint64_t code_space_size(int n) {
    if (n < 2 || n > kMaxCodeVertices)
        throw std::invalid_argument("code_space_size: n must be in [2,9]");
    return pow3(pair_count(n));
}

GraphCode::GraphCode(int n_, std::uint64_t index_) : n(n_), index(index_) {
    if (n < 2 || n > kMaxCodeVertices)
        throw std::invalid_argument("GraphCode: n must be in [2,9]");
    if (index >= code_space_size(n))
        throw std::invalid_argument("GraphCode: index out of range for n");
}

bool is_valid(const OrientedGraph& g) {
    if (g.n < 2 || g.n > kMaxVertices) return false;
    const std::uint64_t active = low_mask(g.n);
    for (int v = 0; v < g.n; v++) {
        if (g.out[v] & ~active) return false;
        if (g.out[v] & vertex_bit(v)) return false;  // self-loop
    }
    for (int v = g.n; v < kMaxVertices; v++)
        if (g.out[v]) return false;
    // no pair of oppositely oriented edges
    for (int u = 0; u < g.n; u++)
        for (std::uint64_t m = g.out[u]; m; m &= m - 1) {
            int v = std::countr_zero(m);
            if (g.out[v] & vertex_bit(u)) return false;
        }
    return true;
}

void validate(const OrientedGraph& g) {
    if (!is_valid(g)) throw std::invalid_argument("OrientedGraph: invariant violation");
}

OrientedGraph decode(const GraphCode& code) {
    // Re-check here so raw aggregate-initialized codes are rejected too.
    if (code.n < 2 || code.n > kMaxCodeVertices || code.index >= code_space_size(code.n))
        throw std::invalid_argument("decode: code out of range");
    OrientedGraph g;
    g.n = code.n;
    std::uint64_t idx = code.index;
    for (int i = 0; i < code.n; i++)
        for (int j = i + 1; j < code.n; j++) {
            const auto digit = static_cast<int>(idx % 3);
            idx /= 3;
            if (digit == 1)
                g.out[i] |= vertex_bit(j);
            else if (digit == 2)
                g.out[j] |= vertex_bit(i);
        }
    return g;
}

GraphCode encode(const OrientedGraph& g) {
    validate(g);
    if (g.n > kMaxCodeVertices)
        throw std::invalid_argument("encode: n > 9 exceeds the 64-bit code space");
    std::array<int, 36> digits{};
    int pos = 0;
    for (int i = 0; i < g.n; i++)
        for (int j = i + 1; j < g.n; j++) {
            int d = 0;
            if (g.out[i] & vertex_bit(j))
                d = 1;
            else if (g.out[j] & vertex_bit(i))
                d = 2;
            digits[pos++] = d;
        }
    std::uint64_t idx = 0;
    while (pos-- > 0) idx = idx * 3 + digits[pos];
    return GraphCode(g.n, idx);
}

static void check_vertex(const OrientedGraph& g, int v) {
    if (v < 0 || v >= g.n) throw std::invalid_argument("vertex index out of range");
}

std::uint64_t out_neighborhood(const OrientedGraph& g, int v) {
    check_vertex(g, v);
    return g.out[v];
}

std::uint64_t second_out_neighborhood(const OrientedGraph& g, int v) {
    check_vertex(g, v);
    const std::uint64_t first = g.out[v];
    std::uint64_t reach2 = 0;
    for (std::uint64_t m = first; m; m &= m - 1) reach2 |= g.out[std::countr_zero(m)];
    return reach2 & ~(first | vertex_bit(v));
}

VertexReport vertex_report(const OrientedGraph& g, int v) {
    check_vertex(g, v);
    VertexReport r;
    r.v = v;
    r.d1 = std::popcount(g.out[v]);
    r.d2 = std::popcount(second_out_neighborhood(g, v));
    r.margin = r.d2 - r.d1;
    assert(r.d1 != 0 || r.d2 == 0);  // outdegree zero forces an empty second neighborhood
    return r;
}

Ratio::Ratio(std::uint64_t num_, std::uint64_t den_) : num(num_), den(den_) {
    if (den == 0) throw std::invalid_argument("Ratio: zero denominator");
    const std::uint64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
}

bool operator<(const Ratio& a, const Ratio& b) { return a.num * b.den < b.num * a.den; }

std::string to_string(const Ratio& r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

GraphReport graph_report(const OrientedGraph& g) {
    validate(g);
    GraphReport rep;
    rep.delta = -g.n;  // below any attainable margin
    rep.witness = 0;
    rep.min_outdeg = g.n;
    bool have_ratio = false;
    for (int v = 0; v < g.n; v++) {
        const VertexReport vr = vertex_report(g, v);
        if (vr.margin > rep.delta) {
            rep.delta = vr.margin;
            rep.witness = v;
        }
        if (vr.d1 < rep.min_outdeg) rep.min_outdeg = vr.d1;
        if (vr.d1 >= 1) {
            const Ratio rv(static_cast<std::uint64_t>(vr.d2), static_cast<std::uint64_t>(vr.d1));
            if (!have_ratio || rep.ratio < rv) {
                rep.ratio = rv;
                have_ratio = true;
            }
        }
    }
    return rep;
}

bool min_outdegree_positive(const OrientedGraph& g) {
    validate(g);
    for (int v = 0; v < g.n; v++)
        if (g.out[v] == 0) return false;
    return true;
}

std::string format_graph(const OrientedGraph& g) {
    validate(g);
    std::string s = "n=" + std::to_string(g.n) + " code=";
    if (g.n <= kMaxCodeVertices)
        s += std::to_string(encode(g).index);
    else
        s += "-";
    s += "\n";
    for (int u = 0; u < g.n; u++)
        for (std::uint64_t m = g.out[u]; m; m &= m - 1) {
            const int v = std::countr_zero(m);
            s += std::to_string(u + 1) + "->" + std::to_string(v + 1) + "\n";
        }
    return s;
}

namespace {

// "u->v", 1-based, no surrounding junk
bool parse_edge_line(const std::string& line, int& u, int& v) {
    const auto arrow = line.find("->");
    if (arrow == std::string::npos) return false;
    try {
        std::size_t consumed = 0;
        const int a = std::stoi(line.substr(0, arrow), &consumed);
        if (consumed != arrow) return false;
        const std::string rest = line.substr(arrow + 2);
        const int b = std::stoi(rest, &consumed);
        if (consumed != rest.size()) return false;
        u = a - 1;
        v = b - 1;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

OrientedGraph parse_graph(std::istream& in) {
    std::string line;
    // header: first non-blank line
    do {
        if (!std::getline(in, line)) throw std::invalid_argument("parse_graph: empty input");
        line = strip_cr(line);
    } while (line.empty());

    int n = 0;
    std::string code_str;
    {
        std::istringstream hs(line);
        std::string ntok, ctok;
        if (!(hs >> ntok >> ctok) || ntok.rfind("n=", 0) != 0 || ctok.rfind("code=", 0) != 0)
            throw std::invalid_argument("parse_graph: expected 'n=<n> code=<index>'");
        std::string junk;
        if (hs >> junk) throw std::invalid_argument("parse_graph: trailing tokens in header");
        try {
            std::size_t consumed = 0;
            const std::string nval = ntok.substr(2);
            n = std::stoi(nval, &consumed);
            if (consumed != nval.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("parse_graph: bad vertex count");
        }
        code_str = ctok.substr(5);
    }
    if (n < 2 || n > kMaxVertices) throw std::invalid_argument("parse_graph: n out of range");

    // optional edge list, up to a blank line or EOF
    bool have_edges = false;
    OrientedGraph from_edges;
    from_edges.n = n;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) break;
        int u = 0, v = 0;
        if (!parse_edge_line(line, u, v))
            throw std::invalid_argument("parse_graph: bad edge line '" + line + "'");
        if (u < 0 || u >= n || v < 0 || v >= n || u == v)
            throw std::invalid_argument("parse_graph: edge endpoint out of range");
        if ((from_edges.out[u] & vertex_bit(v)) || (from_edges.out[v] & vertex_bit(u)))
            throw std::invalid_argument("parse_graph: duplicate or oppositely oriented edge");
        from_edges.out[u] |= vertex_bit(v);
        have_edges = true;
    }

    if (code_str == "-") {
        if (!have_edges)
            throw std::invalid_argument("parse_graph: code=- requires an edge list");
        validate(from_edges);
        return from_edges;
    }

    std::uint64_t index = 0;
    try {
        std::size_t consumed = 0;
        index = std::stoull(code_str, &consumed);
        if (consumed != code_str.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_graph: bad code");
    }
    const OrientedGraph g = decode(GraphCode(n, index));
    if (have_edges && !(from_edges == g))
        throw std::invalid_argument("parse_graph: edge list does not match code");
    return g;
}

OrientedGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

}  // namespace snc
