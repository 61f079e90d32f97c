#pragma once
// Deterministic random instance generators shared by the property tests and
// the acceptance suite. Integer-heavy coefficients keep the brute-force
// oracles numerically exact.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "orgnet/core.hpp"
#include "orgnet/lp_model.hpp"
#include "orgnet/multicast.hpp"

namespace testgen {

// Random tiny LP: coefficients in {-2..2}, mixed relations, optionally boxed
// so the instance cannot be unbounded.
inline orgnet::lp::LpModel random_lp(std::mt19937& rng, int max_vars = 5,
                                     int max_rows = 6) {
    std::uniform_int_distribution<int> nv(2, max_vars), nr(2, max_rows), coef(-2, 2),
        rel(0, 2), rhs(-3, 3), boxed(0, 1);
    orgnet::lp::LpModel m;
    const int n = nv(rng);
    const bool box = boxed(rng) == 1;
    for (int j = 0; j < n; ++j) m.add_var(coef(rng), 0.0, box ? 3.0 : orgnet::lp::kInf);
    const int rows = nr(rng);
    for (int i = 0; i < rows; ++i) {
        int r = m.add_row(static_cast<orgnet::lp::Relation>(rel(rng)), rhs(rng));
        bool any = false;
        for (int j = 0; j < n; ++j) {
            int a = coef(rng);
            if (a != 0) {
                m.add_term(r, j, a);
                any = true;
            }
        }
        if (!any) m.add_term(r, 0, 1.0);
    }
    return m;
}

// Random digraph on <= max_nodes nodes with integer capacities in [0, 5].
// Node 0 is the source, node 1 the sink; edge classes follow the domain rules
// (node 0 sender, node 1 receiver, rest relays).
struct RandomFlowGraph {
    orgnet::Graph graph;
    orgnet::CapacityMap caps;
    std::string source = "s";
    std::string sink = "t";
};

inline RandomFlowGraph random_flow_graph(std::mt19937& rng, int max_nodes = 8) {
    std::uniform_int_distribution<int> nn(4, max_nodes), cap(0, 5), pct(0, 99);
    RandomFlowGraph out;
    const int n = nn(rng);
    out.graph.nodes.push_back({"s", orgnet::NodeKind::Sender});
    out.graph.nodes.push_back({"t", orgnet::NodeKind::Receiver});
    for (int i = 2; i < n; ++i)
        out.graph.nodes.push_back({"r" + std::to_string(i), orgnet::NodeKind::Relay});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || j == 0 || i == 1) continue;  // respect edge classes
            if (pct(rng) < 40) {
                const auto& from = out.graph.nodes[i].id;
                const auto& to = out.graph.nodes[j].id;
                out.graph.edges.push_back({from, to, 1.0});
                out.caps[{from, to}] = static_cast<double>(cap(rng));
            }
        }
    }
    return out;
}

// Random small contingency problem. Relays are always present so that strict
// instances with multi-receiver messages stay satisfiable; a fraction of the
// class edges is dropped to vary the topology.
inline orgnet::Problem random_problem(std::mt19937& rng) {
    using namespace orgnet;
    std::uniform_int_distribution<int> nt(1, 3), nr(1, 3), cost(1, 5), pct(0, 99),
        sz(1, 2), nb(1, 2), mode(0, 1);
    Problem p;
    const int T = nt(rng), R = nr(rng);
    Graph full = build_graph(1, T, R, [&](const std::string&, const std::string&) {
        return static_cast<double>(cost(rng));
    });
    p.graph.nodes = full.nodes;
    for (const auto& e : full.edges) {
        // always keep the sender->relay and relay->receiver backbone via r0
        const bool backbone = (e.from == "s0" && e.to == "r0") || e.from == "r0";
        if (backbone || pct(rng) < 70) p.graph.edges.push_back(e);
    }
    const int B = nb(rng);
    for (int b = 0; b < B; ++b) {
        Broadcast bc;
        bc.id = "b" + std::to_string(b);
        const int M = nb(rng);
        for (int mi = 0; mi < M; ++mi) {
            Message m;
            m.source = "s0";
            m.size = static_cast<double>(sz(rng));
            std::set<std::string> chosen;
            std::uniform_int_distribution<int> pick(0, T - 1);
            const int want = 1 + (pct(rng) % T);
            while (static_cast<int>(chosen.size()) < want)
                chosen.insert("t" + std::to_string(pick(rng)));
            m.receivers.assign(chosen.begin(), chosen.end());
            bc.messages.push_back(std::move(m));
        }
        p.broadcasts.push_back(std::move(bc));
    }
    p.sender_replication =
        mode(rng) == 0 ? SenderReplication::Strict : SenderReplication::Relaxed;
    return p;
}

}  // namespace testgen
