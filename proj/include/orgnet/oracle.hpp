#pragma once
// Independent brute-force verifiers: exact min cut by bipartition
// enumeration, tiny-LP optimization by basic-solution enumeration, an
// exhaustive GF(2) decode check, and a from-scratch recheck of every
// contingency constraint family. The recheck deliberately shares no
// row-construction code with the LP builder; adjacency is recomputed here
// from the raw problem data.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orgnet/contingency.hpp"
#include "orgnet/core.hpp"
#include "orgnet/lp_model.hpp"
#include "orgnet/netcode.hpp"

namespace orgnet::oracle {

struct OracleReport {
    enum class Method { CutEnum, VertexEnum, ConstraintRecheck, ExhaustiveGF2 };
    std::string subject;
    Method method = Method::ConstraintRecheck;
    bool pass = false;
    double worst_residual = 0.0;
    std::optional<std::string> witness;  // present iff !pass
};

// Exact minimum s-t cut value by enumerating all node bipartitions with s on
// the source side. Exponential; guarded by the node cap.
inline double min_cut_enum(const Graph& g, const CapacityMap& caps,
                           const std::string& source, const std::string& sink,
                           int max_nodes = 16) {
    GraphIndex gi(g);
    const int n = gi.n_nodes();
    if (n > max_nodes)
        throw ResourceError("min_cut_enum: graph exceeds the node cap");
    const int s = gi.node(source), t = gi.node(sink);
    if (s == t) throw InputError("min_cut_enum: source equals sink");

    std::vector<int> others;
    for (int i = 0; i < n; ++i)
        if (i != s && i != t) others.push_back(i);
    const std::uint64_t count = 1ull << others.size();
    double best = lp::kInf;
    std::vector<char> side(n, 0);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        std::fill(side.begin(), side.end(), 0);
        side[s] = 1;
        for (std::size_t i = 0; i < others.size(); ++i)
            if (mask & (1ull << i)) side[others[i]] = 1;
        double cut = 0.0;
        for (const auto& e : g.edges)
            if (side[gi.node(e.from)] && !side[gi.node(e.to)]) cut += caps.at(e.key());
        best = std::min(best, cut);
    }
    return best;
}

struct VertexEnumResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> point;
};

namespace detail {

inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    x.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        double best = 1e-9;
        for (int r = k; r < n; ++r)
            if (std::fabs(a[r][k]) > best) {
                best = std::fabs(a[r][k]);
                piv = r;
            }
        if (piv < 0) return false;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (int r = k + 1; r < n; ++r) {
            const double f = a[r][k] / a[k][k];
            if (f == 0.0) continue;
            for (int c = k; c < n; ++c) a[r][c] -= f * a[k][c];
            b[r] -= f * b[k];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        double s = b[k];
        for (int c = k + 1; c < n; ++c) s -= a[k][c] * x[c];
        x[k] = s / a[k][k];
    }
    return true;
}

}  // namespace detail

// Enumerates every candidate active set of size n_vars (constraint rows taken
// as equalities plus finite variable bounds), solves the square system, keeps
// feasible points, and returns the best objective. Size-capped.
inline VertexEnumResult lp_vertex_enum(const lp::LpModel& m, int max_vars = 8,
                                       int max_rows = 12) {
    if (m.n_vars > max_vars || m.n_rows() > max_rows)
        throw ResourceError("lp_vertex_enum: model exceeds the size caps");
    const int n = m.n_vars;
    struct Cand {
        std::vector<double> row;
        double rhs;
    };
    std::vector<Cand> cands;
    for (const auto& r : m.rows) {
        Cand c;
        c.row.assign(n, 0.0);
        for (const auto& [j, a] : r.terms) c.row[j] += a;
        c.rhs = r.rhs;
        cands.push_back(std::move(c));
    }
    for (int j = 0; j < n; ++j) {
        for (double bound : {m.lower[j], m.upper[j]}) {
            if (!std::isfinite(bound)) continue;
            Cand c;
            c.row.assign(n, 0.0);
            c.row[j] = 1.0;
            c.rhs = bound;
            cands.push_back(std::move(c));
        }
    }

    VertexEnumResult best;
    const int K = static_cast<int>(cands.size());
    std::vector<int> pick(n);
    std::vector<std::vector<double>> a(n);
    std::vector<double> b(n), x;
    auto consider = [&]() {
        for (int i = 0; i < n; ++i) {
            a[i] = cands[pick[i]].row;
            b[i] = cands[pick[i]].rhs;
        }
        if (!detail::solve_square(a, b, x)) return;
        for (int j = 0; j < n; ++j)
            if (x[j] < m.lower[j] - 1e-7 || x[j] > m.upper[j] + 1e-7) return;
        for (const auto& r : m.rows)
            if (lp::row_residual(r, x) > 1e-7) return;
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += m.objective[j] * x[j];
        if (!best.feasible || obj < best.objective) {
            best.feasible = true;
            best.objective = obj;
            best.point = x;
        }
    };
    // Iterative combination enumeration.
    if (n == 0) return best;
    if (K < n) return best;
    for (int i = 0; i < n; ++i) pick[i] = i;
    while (true) {
        consider();
        int i = n - 1;
        while (i >= 0 && pick[i] == K - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

// Exhaustive decode check: for every source-bit combination, every listed
// receiver must decode every source bit exactly.
inline OracleReport gf2_exhaustive_check(const LinearCode& code,
                                         const std::vector<std::string>& receivers) {
    OracleReport rep;
    rep.subject = "gf2-code";
    rep.method = OracleReport::Method::ExhaustiveGF2;
    rep.pass = true;
    std::vector<Decoder> decoders;
    for (const auto& r : receivers) {
        decoders.push_back(decodable(code, r));
        if (!decoders.back().decodable) {
            rep.pass = false;
            rep.witness = "receiver " + r + " not decodable";
            return rep;
        }
    }
    const std::uint64_t count = 1ull << code.source_dim;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        const auto edge_bits = evaluate(code, bits);
        for (std::size_t ri = 0; ri < receivers.size(); ++ri) {
            const Decoder& dec = decoders[ri];
            std::uint64_t received = 0;
            for (std::size_t i = 0; i < dec.in_edges.size(); ++i)
                if (edge_bits.at(dec.in_edges[i])) received |= 1ull << i;
            for (int bit = 0; bit < code.source_dim; ++bit) {
                const int want = static_cast<int>((bits >> bit) & 1);
                if (dec.decode_bit(bit, received) != want) {
                    rep.pass = false;
                    rep.witness = "receiver " + receivers[ri] + " misdecodes bit " +
                                  std::to_string(bit) + " on input " + std::to_string(bits);
                    return rep;
                }
            }
        }
    }
    return rep;
}

// From-scratch recheck of the contingency constraint families against a
// solved topology and flow set. `delivered` switches the value equalities to
// the weighted-delivery form. Missing flow entries are zero.
inline OracleReport recheck_appendix_constraints(
    const Problem& p, const Topology& topo, const FlowSet& flows, double tol = 1e-8,
    const std::optional<std::map<ImportanceKey, double>>& delivered = std::nullopt) {
    OracleReport rep;
    rep.subject = "contingency-solution";
    rep.method = OracleReport::Method::ConstraintRecheck;
    rep.pass = true;

    // Own adjacency, string-keyed, built directly from the edge list.
    std::map<std::string, std::vector<EdgeKey>> outs, ins;
    std::map<std::string, NodeKind> kinds;
    for (const auto& n : p.graph.nodes) {
        kinds[n.id] = n.kind;
        outs[n.id];
        ins[n.id];
    }
    for (const auto& e : p.graph.edges) {
        outs[e.from].push_back(e.key());
        ins[e.to].push_back(e.key());
    }

    auto weight = [&](const EdgeKey& e) {
        auto it = topo.weights.find(e);
        return it == topo.weights.end() ? 0.0 : it->second;
    };
    auto fval = [&](const std::string& b, int mi, const EdgeKey& e) {
        auto it = flows.message_flows.find({b, mi, e});
        return it == flows.message_flows.end() ? 0.0 : it->second;
    };
    auto fhval = [&](const std::string& b, int mi, const EdgeKey& e, const std::string& t) {
        auto it = flows.pair_flows.find({b, mi, e, t});
        return it == flows.pair_flows.end() ? 0.0 : it->second;
    };
    auto dval = [&](const std::string& b, int mi, const std::string& t, double omega) {
        if (!delivered) return omega;
        auto it = delivered->find({b, mi, t});
        return it == delivered->end() ? 0.0 : it->second;
    };

    auto flag = [&](double residual, const std::string& what) {
        rep.worst_residual = std::max(rep.worst_residual, residual);
        if (residual > tol && rep.pass) {
            rep.pass = false;
            rep.witness = what + " (residual " + std::to_string(residual) + ")";
        }
    };

    // Variable domain: everything nonnegative.
    for (const auto& [e, wv] : topo.weights) flag(-wv, "nonnegativity: weight " + e.first + "->" + e.second);
    for (const auto& [k, v] : flows.message_flows)
        flag(-v, "nonnegativity: message flow");
    for (const auto& [k, v] : flows.pair_flows) flag(-v, "nonnegativity: pair flow");

    const bool strict = p.sender_replication == SenderReplication::Strict;

    for (const auto& bc : p.broadcasts) {
        // 1. Broadcast capacity on every edge.
        for (const auto& e : p.graph.edges) {
            double total = 0.0;
            for (int mi = 0; mi < static_cast<int>(bc.messages.size()); ++mi)
                total += fval(bc.id, mi, e.key());
            flag(total - weight(e.key()),
                 "broadcast-capacity: " + bc.id + " edge " + e.from + "->" + e.to);
        }

        for (int mi = 0; mi < static_cast<int>(bc.messages.size()); ++mi) {
            const Message& msg = bc.messages[mi];
            const std::string tag = bc.id + "/" + std::to_string(mi);

            // 2. Per-message flow leaving the sender. With partial delivery,
            // strict mode requires the outflow to equal some sent amount in
            // [max_t d_t, omega]; relaxed mode only lower-bounds it by each
            // delivered amount.
            double sent = 0.0;
            for (const auto& e : outs.at(msg.source)) sent += fval(bc.id, mi, e);
            if (!delivered) {
                if (strict)
                    flag(std::fabs(sent - msg.size), "sender-message-total: " + tag);
                else
                    flag(msg.size - sent, "sender-message-total: " + tag);
            } else if (strict) {
                double dmax = 0.0;
                for (const auto& t : msg.receivers)
                    dmax = std::max(dmax, dval(bc.id, mi, t, msg.size));
                flag(dmax - sent, "sender-message-total: " + tag);
                flag(sent - msg.size, "sender-message-total: " + tag);
            } else {
                for (const auto& t : msg.receivers)
                    flag(dval(bc.id, mi, t, msg.size) - sent,
                         "sender-message-total: " + tag + " for " + t);
            }

            // 3. Per-message flow arriving at each receiver.
            for (const auto& t : msg.receivers) {
                double got = 0.0;
                for (const auto& e : ins.at(t)) got += fval(bc.id, mi, e);
                flag(std::fabs(got - dval(bc.id, mi, t, msg.size)),
                     "receiver-message-total: " + tag + " at " + t);
            }

            // 4. Replication off the sender and the receiver set.
            for (const auto& [nid, kind] : kinds) {
                if (nid == msg.source) continue;
                bool is_receiver_of_m = false;
                for (const auto& t : msg.receivers) is_receiver_of_m |= (t == nid);
                if (is_receiver_of_m) continue;
                double heard = 0.0;
                for (const auto& e : ins.at(nid)) heard += fval(bc.id, mi, e);
                for (const auto& e : outs.at(nid))
                    flag(fval(bc.id, mi, e) - heard,
                         "relay-replication: " + tag + " at " + nid);
            }

            for (const auto& t : msg.receivers) {
                // 5. Pair flows bounded by message flows.
                for (const auto& e : p.graph.edges)
                    flag(fhval(bc.id, mi, e.key(), t) - fval(bc.id, mi, e.key()),
                         "pair-consistency: " + tag + " for " + t);

                const double value = dval(bc.id, mi, t, msg.size);
                // 6. Pair flow leaving the sender.
                double psent = 0.0;
                for (const auto& e : outs.at(msg.source)) psent += fhval(bc.id, mi, e, t);
                flag(std::fabs(psent - value), "pair-sender-value: " + tag + " for " + t);

                // 7. Pair flow arriving at the receiver.
                double pgot = 0.0;
                for (const auto& e : ins.at(t)) pgot += fhval(bc.id, mi, e, t);
                flag(std::fabs(pgot - value), "pair-receiver-value: " + tag + " for " + t);

                // 8. Pair conservation everywhere else.
                for (const auto& [nid, kind] : kinds) {
                    if (nid == msg.source || nid == t) continue;
                    double in = 0.0, out = 0.0;
                    for (const auto& e : ins.at(nid)) in += fhval(bc.id, mi, e, t);
                    for (const auto& e : outs.at(nid)) out += fhval(bc.id, mi, e, t);
                    flag(std::fabs(in - out),
                         "pair-conservation: " + tag + " for " + t + " at " + nid);
                }
            }
        }
    }

    // Optional node limits on standing weights.
    for (const auto& [nid, lim] : p.node_limits) {
        if (lim.in_capacity) {
            double total = 0.0;
            for (const auto& e : ins.at(nid)) total += weight(e);
            flag(total - *lim.in_capacity, "node-limit-in: " + nid);
        }
        if (lim.out_capacity) {
            double total = 0.0;
            for (const auto& e : outs.at(nid)) total += weight(e);
            flag(total - *lim.out_capacity, "node-limit-out: " + nid);
        }
    }
    return rep;
}

}  // namespace orgnet::oracle
