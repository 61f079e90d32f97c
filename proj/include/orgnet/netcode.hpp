#pragma once
// Linear network codes over GF(2) on acyclic graphs: propagate global coding
// vectors, evaluate concrete transmissions bit by bit, and decide receiver
// decodability (with an explicit decoding matrix). Includes the canonical
// butterfly fixture where the middle relay XORs its two inputs.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orgnet/core.hpp"

namespace orgnet {

// A linear code on an acyclic graph with k source bits. Each out-edge of the
// source selects a GF(2) combination of the source bits; each out-edge of any
// other node selects a combination of that node's in-edges (in graph edge
// order). Coefficient rows are bitmasks, bit i = i-th source bit / in-edge.
struct LinearCode {
    Graph graph;
    int source_dim = 0;  // k <= 64
    std::map<EdgeKey, std::uint64_t> local_rules;
};

// Global coding vector per edge: the GF(2) combination of source bits the
// edge carries, as a k-bit mask.
using CodingVectors = std::map<EdgeKey, std::uint64_t>;

namespace detail {

inline int parity64(std::uint64_t v) {
    return static_cast<int>(__builtin_popcountll(v) & 1);
}

// Topological node order; throws on cycles.
inline std::vector<int> topo_order(const GraphIndex& gi) {
    const int n = gi.n_nodes();
    std::vector<int> indeg(n, 0), order;
    for (int i = 0; i < n; ++i) indeg[i] = static_cast<int>(gi.in_edges[i].size());
    std::vector<int> stack;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) stack.push_back(i);
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        order.push_back(u);
        for (int e : gi.out_edges[u]) {
            int v = gi.node(gi.graph->edges[e].to);
            if (--indeg[v] == 0) stack.push_back(v);
        }
    }
    if (static_cast<int>(order.size()) != n)
        throw InputError("linear code requires an acyclic graph");
    return order;
}

}  // namespace detail

// Computes every edge's global coding vector in topological order: a source
// out-edge carries its rule directly over the source bits, any other edge
// carries the rule-selected XOR of its tail node's in-edge vectors.
inline CodingVectors propagate(const LinearCode& code) {
    if (code.source_dim < 1 || code.source_dim > 64)
        throw InputError("source_dim must be in [1, 64]");
    GraphIndex gi(code.graph);
    const auto order = detail::topo_order(gi);
    CodingVectors vec;
    for (int u : order) {
        const bool is_source = code.graph.nodes[u].kind == NodeKind::Sender;
        const auto& ins = gi.in_edges[u];
        for (int e : gi.out_edges[u]) {
            const EdgeKey key = code.graph.edges[e].key();
            auto rule = code.local_rules.find(key);
            const std::uint64_t mask =
                rule == code.local_rules.end() ? 0 : rule->second;
            std::uint64_t v = 0;
            if (is_source) {
                v = mask & ((code.source_dim == 64)
                                ? ~0ull
                                : ((1ull << code.source_dim) - 1));
            } else {
                for (std::size_t i = 0; i < ins.size(); ++i)
                    if (mask & (1ull << i)) v ^= vec.at(code.graph.edges[ins[i]].key());
            }
            vec[key] = v;
        }
    }
    return vec;
}

// Concrete transmission: the bit on each edge for the given source bits
// (bit i of source_bits = source bit i).
inline std::map<EdgeKey, int> evaluate(const LinearCode& code, std::uint64_t source_bits) {
    if (code.source_dim < 64 && (source_bits >> code.source_dim) != 0)
        throw InputError("source_bits has more than source_dim bits");
    const CodingVectors vec = propagate(code);
    std::map<EdgeKey, int> bits;
    for (const auto& [key, v] : vec) bits[key] = detail::parity64(v & source_bits);
    return bits;
}

// Decodability of one receiver: true iff its in-edge coding vectors span
// GF(2)^k. On success `rows` holds a k x |in| decoding matrix as bitmasks
// over the in-edges (in-edge order as in `in_edges`): source bit i is the
// XOR of the received bits selected by rows[i].
struct Decoder {
    bool decodable = false;
    std::vector<EdgeKey> in_edges;
    std::vector<std::uint64_t> rows;

    int decode_bit(int i, std::uint64_t received_bits) const {
        return detail::parity64(rows.at(i) & received_bits);
    }
};

inline Decoder decodable(const LinearCode& code, const std::string& receiver) {
    GraphIndex gi(code.graph);
    const int t = gi.node(receiver);
    const CodingVectors vec = propagate(code);

    Decoder dec;
    for (int e : gi.in_edges[t]) dec.in_edges.push_back(code.graph.edges[e].key());
    const int d = static_cast<int>(dec.in_edges.size());
    const int k = code.source_dim;

    // Gauss-Jordan on the d x k system, carrying identity over the in-edges:
    // rows are (coding vector | e_j).
    std::vector<std::uint64_t> a(d), id(d);
    for (int j = 0; j < d; ++j) {
        a[j] = vec.at(dec.in_edges[j]);
        id[j] = 1ull << j;
    }
    std::vector<int> pivot_row_of_bit(k, -1);
    int rank = 0;
    for (int bit = 0; bit < k && rank < d; ++bit) {
        int piv = -1;
        for (int r = rank; r < d; ++r)
            if (a[r] & (1ull << bit)) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[rank], a[piv]);
        std::swap(id[rank], id[piv]);
        for (int r = 0; r < d; ++r) {
            if (r != rank && (a[r] & (1ull << bit))) {
                a[r] ^= a[rank];
                id[r] ^= id[rank];
            }
        }
        pivot_row_of_bit[bit] = rank;
        ++rank;
    }
    dec.decodable = true;
    for (int bit = 0; bit < k; ++bit)
        if (pivot_row_of_bit[bit] < 0) dec.decodable = false;
    if (dec.decodable) {
        dec.rows.resize(k);
        for (int bit = 0; bit < k; ++bit) dec.rows[bit] = id[pivot_row_of_bit[bit]];
    }
    return dec;
}

// The canonical two-bit butterfly: source S emits bit a towards A and bit b
// towards B; A and B serve their local receiver directly and feed the middle
// relay V; V forwards over the bottleneck V->W; W fans out to both receivers.
inline Graph butterfly_graph(double edge_cost = 1.0) {
    Graph g;
    g.nodes = {{"S", NodeKind::Sender},  {"A", NodeKind::Relay},
               {"B", NodeKind::Relay},   {"V", NodeKind::Relay},
               {"W", NodeKind::Relay},   {"R1", NodeKind::Receiver},
               {"R2", NodeKind::Receiver}};
    g.edges = {{"S", "A", edge_cost}, {"S", "B", edge_cost}, {"A", "R1", edge_cost},
               {"A", "V", edge_cost}, {"B", "V", edge_cost}, {"B", "R2", edge_cost},
               {"V", "W", edge_cost}, {"W", "R1", edge_cost}, {"W", "R2", edge_cost}};
    return g;
}

// Butterfly code with the XOR combination at V. Every other node forwards its
// single input.
inline LinearCode butterfly_xor_code() {
    LinearCode code;
    code.graph = butterfly_graph();
    code.source_dim = 2;
    code.local_rules = {
        {{"S", "A"}, 0b01},  // bit a
        {{"S", "B"}, 0b10},  // bit b
        {{"A", "R1"}, 0b1},  {{"A", "V"}, 0b1},
        {{"B", "V"}, 0b1},   {{"B", "R2"}, 0b1},
        {{"V", "W"}, 0b11},  // a XOR b
        {{"W", "R1"}, 0b1},  {{"W", "R2"}, 0b1},
    };
    return code;
}

// All copy-and-forward choices at V: the bottleneck edge copies the first
// input, the second input, or nothing. Everything else is unchanged (all
// other nodes have a single input, so copying is their only option).
inline std::vector<LinearCode> butterfly_copy_forward_codes() {
    std::vector<LinearCode> codes;
    for (std::uint64_t rule : {0b01ull, 0b10ull, 0b00ull}) {
        LinearCode code = butterfly_xor_code();
        code.local_rules[{"V", "W"}] = rule;
        codes.push_back(std::move(code));
    }
    return codes;
}

}  // namespace orgnet
