#pragma once
// Minimum-cost contingency planning: build the full linear program over edge
// weights w_e, per-message flows f_{b,m,e} and per-pair flows fhat_{b,m,e,t},
// solve it, and extract the optimal topology and flows. Also the weighted
// variant where receivers may be served partially and delivery earns a
// per-unit benefit.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "orgnet/core.hpp"
#include "orgnet/simplex.hpp"

namespace orgnet {

// Column layout of the contingency LP, in fixed order: the w block (one
// column per edge, graph order), then the f blocks grouped by broadcast and
// message, then the fhat blocks grouped by broadcast, message and receiver.
// Weighted mode appends the delivered-amount block d_{b,m,t} and (strict
// replication only) the per-message sent-amount block s_{b,m}.
struct VarIndex {
    enum class Kind { Weight, MessageFlow, PairFlow, Delivered, Sent };
    struct ColRef {
        Kind kind = Kind::Weight;
        int b = -1;  // broadcast index
        int m = -1;  // message index within broadcast
        int t = -1;  // receiver index within the message's receiver list
        int e = -1;  // edge index
    };

    int n_edges = 0;
    int n_cols = 0;
    std::vector<std::vector<int>> f_base;                  // [b][m]
    std::vector<std::vector<std::vector<int>>> fhat_base;  // [b][m][t]
    std::vector<std::vector<std::vector<int>>> d_col;      // [b][m][t], weighted only
    std::vector<std::vector<int>> sent_col;                // [b][m], weighted strict only
    std::vector<ColRef> col_refs;                          // inverse map, one per column

    int w(int e) const { return e; }
    int f(int b, int m, int e) const { return f_base[b][m] + e; }
    int fhat(int b, int m, int t, int e) const { return fhat_base[b][m][t] + e; }
    int d(int b, int m, int t) const { return d_col[b][m][t]; }
    int sent(int b, int m) const { return sent_col[b][m]; }
    const ColRef& decode(int col) const { return col_refs.at(col); }
};

// Row bookkeeping: the constraint families in emission order. Families map
// one-to-one onto the displayed program; node-limit rows are the optional
// capacity extension.
struct RowRef {
    enum class Family {
        BroadcastCapacity,     // sum_m f_{b,m,e} <= w_e
        SenderMessageTotal,    // sum_{out(s)} f = omega (strict) / >= omega (relaxed)
        ReceiverMessageTotal,  // sum_{in(t)} f = omega
        RelayReplication,      // f on each out-edge <= sum of f on in-edges
        PairConsistency,       // fhat <= f
        PairSenderValue,       // sum_{out(s)} fhat = omega
        PairReceiverValue,     // sum_{in(t)} fhat = omega
        PairConservation,      // fhat inflow = fhat outflow off {s, t}
        NodeLimitIn,           // sum_{in(n)} w <= cap
        NodeLimitOut,          // sum_{out(n)} w <= cap
    };
    Family family{};
    int b = -1, m = -1, t = -1, node = -1, e = -1;
};

inline const char* to_string(RowRef::Family f) {
    switch (f) {
        case RowRef::Family::BroadcastCapacity: return "broadcast-capacity";
        case RowRef::Family::SenderMessageTotal: return "sender-message-total";
        case RowRef::Family::ReceiverMessageTotal: return "receiver-message-total";
        case RowRef::Family::RelayReplication: return "relay-replication";
        case RowRef::Family::PairConsistency: return "pair-consistency";
        case RowRef::Family::PairSenderValue: return "pair-sender-value";
        case RowRef::Family::PairReceiverValue: return "pair-receiver-value";
        case RowRef::Family::PairConservation: return "pair-conservation";
        case RowRef::Family::NodeLimitIn: return "node-limit-in";
        case RowRef::Family::NodeLimitOut: return "node-limit-out";
    }
    return "?";
}

struct ContingencyLp {
    lp::LpModel model;
    VarIndex vars;
    std::vector<RowRef> rows;
    bool weighted = false;

    // Human-readable column name, used by the LP-format export.
    std::string col_name(int col) const {
        const auto& r = vars.decode(col);
        const std::string be = std::to_string(r.b) + "_" + std::to_string(r.m);
        switch (r.kind) {
            case VarIndex::Kind::Weight: return "w_e" + std::to_string(r.e);
            case VarIndex::Kind::MessageFlow:
                return "f_b" + be + "_e" + std::to_string(r.e);
            case VarIndex::Kind::PairFlow:
                return "fh_b" + be + "_t" + std::to_string(r.t) + "_e" + std::to_string(r.e);
            case VarIndex::Kind::Delivered:
                return "d_b" + be + "_t" + std::to_string(r.t);
            case VarIndex::Kind::Sent: return "s_b" + be;
        }
        return "x" + std::to_string(col);
    }
};

namespace detail {

inline ContingencyLp build_contingency_lp(const Problem& p, bool weighted) {
    require_valid(p);
    if (weighted && !p.importance)
        throw InputError("weighted delivery requires an importance map");
    GraphIndex gi(p.graph);
    const int E = gi.n_edges();
    const int B = static_cast<int>(p.broadcasts.size());

    ContingencyLp out;
    out.weighted = weighted;
    lp::LpModel& m = out.model;
    VarIndex& vx = out.vars;
    vx.n_edges = E;

    // Columns. Weight block first, costs on it.
    for (int e = 0; e < E; ++e) {
        m.add_var(p.graph.edges[e].cost);
        vx.col_refs.push_back({VarIndex::Kind::Weight, -1, -1, -1, e});
    }
    vx.f_base.resize(B);
    vx.fhat_base.resize(B);
    vx.d_col.resize(B);
    vx.sent_col.resize(B);
    for (int b = 0; b < B; ++b) {
        const int M = static_cast<int>(p.broadcasts[b].messages.size());
        vx.f_base[b].resize(M);
        vx.fhat_base[b].resize(M);
        vx.d_col[b].resize(M);
        for (int mi = 0; mi < M; ++mi) {
            vx.f_base[b][mi] = m.n_vars;
            for (int e = 0; e < E; ++e) {
                m.add_var(0.0);
                vx.col_refs.push_back({VarIndex::Kind::MessageFlow, b, mi, -1, e});
            }
        }
    }
    for (int b = 0; b < B; ++b) {
        const int M = static_cast<int>(p.broadcasts[b].messages.size());
        for (int mi = 0; mi < M; ++mi) {
            const auto& msg = p.broadcasts[b].messages[mi];
            const int T = static_cast<int>(msg.receivers.size());
            vx.fhat_base[b][mi].resize(T);
            for (int ti = 0; ti < T; ++ti) {
                vx.fhat_base[b][mi][ti] = m.n_vars;
                for (int e = 0; e < E; ++e) {
                    m.add_var(0.0);
                    vx.col_refs.push_back({VarIndex::Kind::PairFlow, b, mi, ti, e});
                }
            }
        }
    }
    const bool strict = p.sender_replication == SenderReplication::Strict;
    if (weighted) {
        for (int b = 0; b < B; ++b) {
            const int M = static_cast<int>(p.broadcasts[b].messages.size());
            vx.sent_col[b].assign(M, -1);
            for (int mi = 0; mi < M; ++mi) {
                const auto& msg = p.broadcasts[b].messages[mi];
                const int T = static_cast<int>(msg.receivers.size());
                vx.d_col[b][mi].resize(T);
                for (int ti = 0; ti < T; ++ti) {
                    double benefit = 0.0;
                    auto it = p.importance->find(
                        {p.broadcasts[b].id, mi, msg.receivers[ti]});
                    if (it != p.importance->end()) benefit = it->second;
                    // maximize benefit*d  ==  minimize -benefit*d
                    vx.d_col[b][mi][ti] = m.add_var(-benefit, 0.0, msg.size);
                    vx.col_refs.push_back({VarIndex::Kind::Delivered, b, mi, ti, -1});
                }
                if (strict) {
                    // Sent amount: what actually leaves the source, at most
                    // one message's worth (the source still cannot replicate).
                    vx.sent_col[b][mi] = m.add_var(0.0, 0.0, msg.size);
                    vx.col_refs.push_back({VarIndex::Kind::Sent, b, mi, -1, -1});
                }
            }
        }
    }
    vx.n_cols = m.n_vars;

    // Skip rows that have no variables and are trivially satisfied at zero;
    // rows with no variables but an unsatisfiable relation stay (they encode
    // structural infeasibility, e.g. an unreachable receiver).
    auto emit = [&](lp::Relation rel, double rhs,
                    const std::vector<std::pair<int, double>>& terms, RowRef ref) {
        if (terms.empty()) {
            const bool trivially_ok = (rel == lp::Relation::LessEq && rhs >= 0.0) ||
                                      (rel == lp::Relation::Equal && rhs == 0.0) ||
                                      (rel == lp::Relation::GreaterEq && rhs <= 0.0);
            if (trivially_ok) return;
        }
        const int r = m.add_row(rel, rhs);
        for (const auto& [j, a] : terms) m.add_term(r, j, a);
        out.rows.push_back(ref);
    };

    std::vector<std::pair<int, double>> terms;

    // 1. Broadcast capacity.
    for (int b = 0; b < B; ++b) {
        const int M = static_cast<int>(p.broadcasts[b].messages.size());
        for (int e = 0; e < E; ++e) {
            terms.clear();
            for (int mi = 0; mi < M; ++mi) terms.emplace_back(vx.f(b, mi, e), 1.0);
            terms.emplace_back(vx.w(e), -1.0);
            emit(lp::Relation::LessEq, 0.0, terms,
                 {RowRef::Family::BroadcastCapacity, b, -1, -1, -1, e});
        }
    }

    // 2. Per-message flow leaving the sender.
    for (int b = 0; b < B; ++b) {
        const auto& msgs = p.broadcasts[b].messages;
        for (int mi = 0; mi < static_cast<int>(msgs.size()); ++mi) {
            const int s = gi.node(msgs[mi].source);
            if (!weighted) {
                terms.clear();
                for (int e : gi.out_edges[s]) terms.emplace_back(vx.f(b, mi, e), 1.0);
                emit(strict ? lp::Relation::Equal : lp::Relation::GreaterEq, msgs[mi].size,
                     terms, {RowRef::Family::SenderMessageTotal, b, mi, -1, s, -1});
            } else if (strict) {
                // Strict with partial delivery: the outflow equals the sent
                // amount, a variable capped at one message's worth. Delivered
                // amounts are bounded by it through the pair-flow rows.
                terms.clear();
                for (int e : gi.out_edges[s]) terms.emplace_back(vx.f(b, mi, e), 1.0);
                terms.emplace_back(vx.sent(b, mi), -1.0);
                emit(lp::Relation::Equal, 0.0, terms,
                     {RowRef::Family::SenderMessageTotal, b, mi, -1, s, -1});
            } else {
                // Relaxed with partial delivery: the sender only needs to emit
                // what any single receiver actually gets; one >= d row each.
                for (int ti = 0; ti < static_cast<int>(msgs[mi].receivers.size()); ++ti) {
                    terms.clear();
                    for (int e : gi.out_edges[s]) terms.emplace_back(vx.f(b, mi, e), 1.0);
                    terms.emplace_back(vx.d(b, mi, ti), -1.0);
                    emit(lp::Relation::GreaterEq, 0.0, terms,
                         {RowRef::Family::SenderMessageTotal, b, mi, ti, s, -1});
                }
            }
        }
    }

    // 3. Per-message flow arriving at each receiver.
    for (int b = 0; b < B; ++b) {
        const auto& msgs = p.broadcasts[b].messages;
        for (int mi = 0; mi < static_cast<int>(msgs.size()); ++mi) {
            for (int ti = 0; ti < static_cast<int>(msgs[mi].receivers.size()); ++ti) {
                const int t = gi.node(msgs[mi].receivers[ti]);
                terms.clear();
                for (int e : gi.in_edges[t]) terms.emplace_back(vx.f(b, mi, e), 1.0);
                if (weighted) {
                    terms.emplace_back(vx.d(b, mi, ti), -1.0);
                    emit(lp::Relation::Equal, 0.0, terms,
                         {RowRef::Family::ReceiverMessageTotal, b, mi, ti, t, -1});
                } else {
                    emit(lp::Relation::Equal, msgs[mi].size, terms,
                         {RowRef::Family::ReceiverMessageTotal, b, mi, ti, t, -1});
                }
            }
        }
    }

    // 4. Replication: a node can only repeat as much of a message as it has
    // heard; emitted per out-edge for every node other than the sender and
    // the message's receivers.
    for (int b = 0; b < B; ++b) {
        const auto& msgs = p.broadcasts[b].messages;
        for (int mi = 0; mi < static_cast<int>(msgs.size()); ++mi) {
            const int s = gi.node(msgs[mi].source);
            std::vector<char> excluded(gi.n_nodes(), 0);
            excluded[s] = 1;
            for (const auto& rid : msgs[mi].receivers) excluded[gi.node(rid)] = 1;
            for (int n = 0; n < gi.n_nodes(); ++n) {
                if (excluded[n]) continue;
                for (int e : gi.out_edges[n]) {
                    terms.clear();
                    terms.emplace_back(vx.f(b, mi, e), 1.0);
                    for (int ein : gi.in_edges[n]) terms.emplace_back(vx.f(b, mi, ein), -1.0);
                    emit(lp::Relation::LessEq, 0.0, terms,
                         {RowRef::Family::RelayReplication, b, mi, -1, n, e});
                }
            }
        }
    }

    // 5. Pair flows are bounded by the message flows.
    for (int b = 0; b < B; ++b) {
        const auto& msgs = p.broadcasts[b].messages;
        for (int mi = 0; mi < static_cast<int>(msgs.size()); ++mi) {
            for (int ti = 0; ti < static_cast<int>(msgs[mi].receivers.size()); ++ti) {
                for (int e = 0; e < E; ++e) {
                    terms.clear();
                    terms.emplace_back(vx.fhat(b, mi, ti, e), 1.0);
                    terms.emplace_back(vx.f(b, mi, e), -1.0);
                    emit(lp::Relation::LessEq, 0.0, terms,
                         {RowRef::Family::PairConsistency, b, mi, ti, -1, e});
                }
            }
        }
    }

    // 6..8. Per-pair value and conservation.
    for (int b = 0; b < B; ++b) {
        const auto& msgs = p.broadcasts[b].messages;
        for (int mi = 0; mi < static_cast<int>(msgs.size()); ++mi) {
            const int s = gi.node(msgs[mi].source);
            for (int ti = 0; ti < static_cast<int>(msgs[mi].receivers.size()); ++ti) {
                const int t = gi.node(msgs[mi].receivers[ti]);
                terms.clear();
                for (int e : gi.out_edges[s]) terms.emplace_back(vx.fhat(b, mi, ti, e), 1.0);
                if (weighted) terms.emplace_back(vx.d(b, mi, ti), -1.0);
                emit(lp::Relation::Equal, weighted ? 0.0 : msgs[mi].size, terms,
                     {RowRef::Family::PairSenderValue, b, mi, ti, s, -1});

                terms.clear();
                for (int e : gi.in_edges[t]) terms.emplace_back(vx.fhat(b, mi, ti, e), 1.0);
                if (weighted) terms.emplace_back(vx.d(b, mi, ti), -1.0);
                emit(lp::Relation::Equal, weighted ? 0.0 : msgs[mi].size, terms,
                     {RowRef::Family::PairReceiverValue, b, mi, ti, t, -1});

                for (int n = 0; n < gi.n_nodes(); ++n) {
                    if (n == s || n == t) continue;
                    terms.clear();
                    for (int e : gi.in_edges[n]) terms.emplace_back(vx.fhat(b, mi, ti, e), 1.0);
                    for (int e : gi.out_edges[n])
                        terms.emplace_back(vx.fhat(b, mi, ti, e), -1.0);
                    emit(lp::Relation::Equal, 0.0, terms,
                         {RowRef::Family::PairConservation, b, mi, ti, n, -1});
                }
            }
        }
    }

    // Optional standing-capacity limits on nodes, applied to edge weights.
    for (const auto& [id, lim] : p.node_limits) {
        const int n = gi.node(id);
        if (lim.in_capacity) {
            terms.clear();
            for (int e : gi.in_edges[n]) terms.emplace_back(vx.w(e), 1.0);
            emit(lp::Relation::LessEq, *lim.in_capacity, terms,
                 {RowRef::Family::NodeLimitIn, -1, -1, -1, n, -1});
        }
        if (lim.out_capacity) {
            terms.clear();
            for (int e : gi.out_edges[n]) terms.emplace_back(vx.w(e), 1.0);
            emit(lp::Relation::LessEq, *lim.out_capacity, terms,
                 {RowRef::Family::NodeLimitOut, -1, -1, -1, n, -1});
        }
    }

    return out;
}

}  // namespace detail

// Builds the contingency LP exactly as displayed: minimize sum c_e w_e over
// the eight constraint families (plus optional node limits).
inline ContingencyLp build_lp(const Problem& p) {
    return detail::build_contingency_lp(p, false);
}

// Weighted-delivery variant: the hard per-receiver value equalities become
// delivered-amount variables d_{b,m,t} in [0, omega_m] and the objective
// becomes maximize sum importance*d - sum c_e w_e. Under strict replication
// the sender equality pins the outflow to a sent-amount variable capped at
// omega_m (a fixed right-hand side cannot coexist with partial delivery);
// relaxed mode lower-bounds the outflow by every delivered amount.
inline ContingencyLp build_weighted_lp(const Problem& p) {
    return detail::build_contingency_lp(p, true);
}

// Optimized standing network: every edge weight, with support defined by the
// tolerance. Edges below support_tol are planned away entirely.
struct Topology {
    std::map<EdgeKey, double> weights;
    double support_tol = 1e-9;

    std::vector<EdgeKey> support() const {
        std::vector<EdgeKey> out;
        for (const auto& [k, v] : weights)
            if (v > support_tol) out.push_back(k);
        return out;
    }
};

// Nonzero flow values keyed by string ids; absent keys are zero.
struct FlowSet {
    std::map<std::tuple<std::string, int, EdgeKey>, double> message_flows;
    std::map<std::tuple<std::string, int, EdgeKey, std::string>, double> pair_flows;
};

struct ContingencyResult {
    lp::SolveStatus status = lp::SolveStatus::Optimal;
    double objective = 0.0;    // solved objective: cost, or net benefit if weighted
    double cost = 0.0;         // sum c_e w_e
    Topology topology;
    FlowSet flows;
    std::map<ImportanceKey, double> delivered;  // weighted mode only
    lp::LpSolution lp;
    ContingencyLp built;
};

namespace detail {

inline ContingencyResult extract_result(const Problem& p, ContingencyLp&& built,
                                        lp::LpSolution&& sol) {
    ContingencyResult res;
    res.status = sol.status;
    res.built = std::move(built);
    if (sol.status == lp::SolveStatus::Optimal) {
        const auto& vx = res.built.vars;
        const int E = vx.n_edges;
        for (int e = 0; e < E; ++e)
            res.topology.weights[p.graph.edges[e].key()] = std::max(0.0, sol.primal[vx.w(e)]);
        for (int b = 0; b < static_cast<int>(p.broadcasts.size()); ++b) {
            const auto& bc = p.broadcasts[b];
            for (int mi = 0; mi < static_cast<int>(bc.messages.size()); ++mi) {
                const auto& msg = bc.messages[mi];
                for (int e = 0; e < E; ++e) {
                    const double f = sol.primal[vx.f(b, mi, e)];
                    if (f > 1e-12)
                        res.flows.message_flows[{bc.id, mi, p.graph.edges[e].key()}] = f;
                }
                for (int ti = 0; ti < static_cast<int>(msg.receivers.size()); ++ti) {
                    for (int e = 0; e < E; ++e) {
                        const double fh = sol.primal[vx.fhat(b, mi, ti, e)];
                        if (fh > 1e-12)
                            res.flows.pair_flows[{bc.id, mi, p.graph.edges[e].key(),
                                                  msg.receivers[ti]}] = fh;
                    }
                    if (res.built.weighted)
                        res.delivered[{bc.id, mi, msg.receivers[ti]}] =
                            sol.primal[vx.d(b, mi, ti)];
                }
            }
        }
        double cost = 0.0;
        for (int e = 0; e < E; ++e) cost += p.graph.edges[e].cost * sol.primal[vx.w(e)];
        res.cost = cost;
        res.objective = res.built.weighted ? -sol.objective : sol.objective;
    }
    res.lp = std::move(sol);
    return res;
}

}  // namespace detail

// Solves the contingency LP; on Optimal the returned flows satisfy every
// constraint family within the solver tolerance, on Infeasible/Unbounded the
// certificates ride along in `lp`.
inline ContingencyResult solve_contingency(const Problem& p,
                                           const lp::SolveOptions& opts = {}) {
    ContingencyLp built = build_lp(p);
    lp::LpSolution sol = lp::solve(built.model, opts);
    return detail::extract_result(p, std::move(built), std::move(sol));
}

// Weighted delivery: maximizes total importance-weighted delivered amount
// minus the network cost. `objective` is the net benefit.
inline ContingencyResult solve_weighted_delivery(const Problem& p,
                                                 const lp::SolveOptions& opts = {}) {
    ContingencyLp built = build_weighted_lp(p);
    lp::LpSolution sol = lp::solve(built.model, opts);
    return detail::extract_result(p, std::move(built), std::move(sol));
}

// Per-edge summary of a solved instance: support weights, worst-case
// utilization across broadcasts, and per-message routing trees.
struct SolutionReport {
    struct SupportEdge {
        EdgeKey edge;
        double weight = 0.0;
        double utilization = 0.0;  // max over broadcasts of (sum_m f) / w
    };
    struct RoutingTree {
        std::string broadcast;
        int message = 0;
        std::vector<std::pair<EdgeKey, double>> edges;
    };
    std::vector<SupportEdge> support;
    std::vector<RoutingTree> trees;

    std::string text() const {
        char buf[160];
        std::string out = "support edges (" + std::to_string(support.size()) + "):\n";
        for (const auto& s : support) {
            std::snprintf(buf, sizeof(buf), "  %s -> %s  weight %.6g  utilization %.3f\n",
                          s.edge.first.c_str(), s.edge.second.c_str(), s.weight,
                          s.utilization);
            out += buf;
        }
        for (const auto& tr : trees) {
            out += "routing " + tr.broadcast + "/" + std::to_string(tr.message) + ":";
            for (const auto& [e, f] : tr.edges) {
                std::snprintf(buf, sizeof(buf), " %s->%s(%.6g)", e.first.c_str(),
                              e.second.c_str(), f);
                out += buf;
            }
            out += "\n";
        }
        return out;
    }
};

inline SolutionReport extract_report(const Problem& p, const Topology& topo,
                                     const FlowSet& flows) {
    SolutionReport rep;
    for (const auto& edge : p.graph.edges) {
        auto it = topo.weights.find(edge.key());
        if (it == topo.weights.end() || it->second <= topo.support_tol) continue;
        SolutionReport::SupportEdge se;
        se.edge = edge.key();
        se.weight = it->second;
        for (const auto& bc : p.broadcasts) {
            double total = 0.0;
            for (int mi = 0; mi < static_cast<int>(bc.messages.size()); ++mi) {
                auto f = flows.message_flows.find({bc.id, mi, edge.key()});
                if (f != flows.message_flows.end()) total += f->second;
            }
            se.utilization = std::max(se.utilization, total / se.weight);
        }
        rep.support.push_back(se);
    }
    for (const auto& bc : p.broadcasts) {
        for (int mi = 0; mi < static_cast<int>(bc.messages.size()); ++mi) {
            SolutionReport::RoutingTree tree;
            tree.broadcast = bc.id;
            tree.message = mi;
            for (const auto& edge : p.graph.edges) {
                auto f = flows.message_flows.find({bc.id, mi, edge.key()});
                if (f != flows.message_flows.end() && f->second > 1e-9)
                    tree.edges.emplace_back(edge.key(), f->second);
            }
            rep.trees.push_back(std::move(tree));
        }
    }
    return rep;
}

}  // namespace orgnet
