#pragma once
// Throughput side of the model: max-flow / min-cut, coding-achievable
// multicast capacity (min over receivers of the source max-flow), the
// minimum-cost coded multicast LP, welfare maximization with rate as a
// decision variable, and the middle-manager comparison on firm topologies.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orgnet/contingency.hpp"
#include "orgnet/core.hpp"
#include "orgnet/simplex.hpp"

namespace orgnet {

using CapacityMap = std::map<EdgeKey, double>;

inline CapacityMap unit_capacities(const Graph& g) {
    CapacityMap caps;
    for (const auto& e : g.edges) caps[e.key()] = 1.0;
    return caps;
}

struct MaxFlowResult {
    double value = 0.0;
    std::map<EdgeKey, double> flow;
    std::vector<std::string> cut_nodes;  // source side of a minimum cut
    std::vector<EdgeKey> cut_edges;
    double cut_value = 0.0;
};

// Shortest-augmenting-path max flow (BFS layers). Exact on rational
// capacities at this scale; returns the flow together with a minimum-cut
// certificate read off the final residual graph.
inline MaxFlowResult max_flow(const Graph& g, const CapacityMap& caps,
                              const std::string& source, const std::string& sink) {
    if (source == sink) throw InputError("max_flow: source equals sink");
    GraphIndex gi(g);
    const int s = gi.node(source), t = gi.node(sink);
    const int E = gi.n_edges();
    for (const auto& e : g.edges)
        if (!caps.count(e.key()))
            throw InputError("max_flow: missing capacity for edge " + e.from + "->" + e.to);

    // Residual arcs: forward arc 2e, backward arc 2e+1.
    std::vector<double> cap(2 * E, 0.0);
    for (int e = 0; e < E; ++e) cap[2 * e] = caps.at(g.edges[e].key());
    std::vector<std::vector<int>> adj(gi.n_nodes());
    for (int e = 0; e < E; ++e) {
        adj[gi.node(g.edges[e].from)].push_back(2 * e);
        adj[gi.node(g.edges[e].to)].push_back(2 * e + 1);
    }
    auto arc_to = [&](int a) {
        const Edge& e = g.edges[a / 2];
        return (a % 2 == 0) ? gi.node(e.to) : gi.node(e.from);
    };

    MaxFlowResult res;
    std::vector<int> parent_arc(gi.n_nodes());
    while (true) {
        std::fill(parent_arc.begin(), parent_arc.end(), -1);
        parent_arc[s] = -2;
        std::deque<int> queue{s};
        while (!queue.empty() && parent_arc[t] == -1) {
            int u = queue.front();
            queue.pop_front();
            for (int a : adj[u]) {
                int v = arc_to(a);
                if (parent_arc[v] == -1 && cap[a] > 1e-12) {
                    parent_arc[v] = a;
                    queue.push_back(v);
                }
            }
        }
        if (parent_arc[t] == -1) break;
        double push = lp::kInf;
        for (int v = t; v != s;) {
            int a = parent_arc[v];
            push = std::min(push, cap[a]);
            v = (a % 2 == 0) ? gi.node(g.edges[a / 2].from) : gi.node(g.edges[a / 2].to);
        }
        for (int v = t; v != s;) {
            int a = parent_arc[v];
            cap[a] -= push;
            cap[a ^ 1] += push;
            v = (a % 2 == 0) ? gi.node(g.edges[a / 2].from) : gi.node(g.edges[a / 2].to);
        }
        res.value += push;
    }

    for (int e = 0; e < E; ++e)
        res.flow[g.edges[e].key()] = caps.at(g.edges[e].key()) - cap[2 * e];

    // Min cut: nodes reachable in the residual graph.
    std::vector<char> reach(gi.n_nodes(), 0);
    reach[s] = 1;
    std::deque<int> queue{s};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int a : adj[u]) {
            int v = arc_to(a);
            if (!reach[v] && cap[a] > 1e-12) {
                reach[v] = 1;
                queue.push_back(v);
            }
        }
    }
    for (int i = 0; i < gi.n_nodes(); ++i)
        if (reach[i]) res.cut_nodes.push_back(g.nodes[i].id);
    for (const auto& e : g.edges) {
        if (reach[gi.node(e.from)] && !reach[gi.node(e.to)]) {
            res.cut_edges.push_back(e.key());
            res.cut_value += caps.at(e.key());
        }
    }
    return res;
}

// Coding-achievable multicast rate: the minimum over receivers of the
// source-receiver max flow.
inline double multicast_capacity(const Graph& g, const CapacityMap& caps,
                                 const std::string& source,
                                 const std::vector<std::string>& receivers) {
    if (receivers.empty()) throw InputError("multicast_capacity: no receivers");
    double rate = lp::kInf;
    for (const auto& t : receivers) rate = std::min(rate, max_flow(g, caps, source, t).value);
    return rate;
}

struct MulticastResult {
    lp::SolveStatus status = lp::SolveStatus::Optimal;
    double objective = 0.0;
    Topology topology;
    // Per-receiver conserved flows supporting the rate, keyed (receiver, edge).
    std::map<std::pair<std::string, EdgeKey>, double> receiver_flows;
    lp::LpSolution lp;
};

// Concave piecewise-linear benefit: the k-th unit band of rate, of width
// `length`, is worth `slope` per unit. Slopes must be nonincreasing.
struct BenefitSegment {
    double slope = 0.0;
    double length = 0.0;
};

namespace detail {

// Shared builder for the coded-multicast LPs. Columns: w block (one per
// edge), then one flow block per receiver; in welfare mode one rate column
// per benefit segment is appended and the flow-value rows couple to their
// sum instead of a constant.
struct CodedLp {
    lp::LpModel model;
    std::vector<int> rate_cols;
    int flow_base(int ti, int n_edges) const { return n_edges + ti * n_edges; }
};

inline CodedLp build_coded_lp(const Graph& g, const GraphIndex& gi,
                              const std::string& source,
                              const std::vector<std::string>& receivers, double rate,
                              const std::vector<BenefitSegment>& segments,
                              const CapacityMap* weight_caps) {
    CodedLp built;
    lp::LpModel& m = built.model;
    const int E = gi.n_edges();
    for (int e = 0; e < E; ++e) {
        double cap = lp::kInf;
        if (weight_caps) {
            auto it = weight_caps->find(g.edges[e].key());
            if (it != weight_caps->end()) cap = it->second;
        }
        m.add_var(g.edges[e].cost, 0.0, cap);
    }
    for (std::size_t ti = 0; ti < receivers.size(); ++ti)
        for (int e = 0; e < E; ++e) m.add_var(0.0);
    for (const auto& seg : segments)
        built.rate_cols.push_back(m.add_var(-seg.slope, 0.0, seg.length));

    const int s = gi.node(source);
    for (std::size_t ti = 0; ti < receivers.size(); ++ti) {
        const int t = gi.node(receivers[ti]);
        if (t == s) throw InputError("coded multicast: receiver equals source");
        const int base = built.flow_base(static_cast<int>(ti), E);
        // Net outflow at the source and net inflow at the receiver equal the
        // rate; all other nodes conserve.
        for (int n = 0; n < gi.n_nodes(); ++n) {
            std::vector<std::pair<int, double>> terms;
            for (int e : gi.out_edges[n]) terms.emplace_back(base + e, 1.0);
            for (int e : gi.in_edges[n]) terms.emplace_back(base + e, -1.0);
            double rhs = 0.0;
            double rate_coef = 0.0;
            if (n == s) rate_coef = 1.0;
            else if (n == t) rate_coef = -1.0;
            if (!built.rate_cols.empty() && rate_coef != 0.0) {
                for (int rc : built.rate_cols) terms.emplace_back(rc, -rate_coef);
            } else {
                rhs = rate_coef * rate;
            }
            if (terms.empty() && rhs == 0.0) continue;
            const int r = m.add_row(lp::Relation::Equal, rhs);
            for (const auto& [j, a] : terms) m.add_term(r, j, a);
        }
        // Shared capacity: each receiver's flow fits under w independently
        // (flows of distinct receivers may overlap -- the coded region).
        for (int e = 0; e < E; ++e) {
            const int r = m.add_row(lp::Relation::LessEq, 0.0);
            m.add_term(r, base + e, 1.0);
            m.add_term(r, e, -1.0);
        }
    }
    return built;
}

inline MulticastResult extract_multicast(const Graph& g, const GraphIndex& gi,
                                         const std::vector<std::string>& receivers,
                                         const CodedLp& built, lp::LpSolution&& sol) {
    MulticastResult res;
    res.status = sol.status;
    if (sol.status == lp::SolveStatus::Optimal) {
        const int E = gi.n_edges();
        for (int e = 0; e < E; ++e)
            res.topology.weights[g.edges[e].key()] = std::max(0.0, sol.primal[e]);
        for (std::size_t ti = 0; ti < receivers.size(); ++ti) {
            const int base = built.flow_base(static_cast<int>(ti), E);
            for (int e = 0; e < E; ++e) {
                const double x = sol.primal[base + e];
                if (x > 1e-12) res.receiver_flows[{receivers[ti], g.edges[e].key()}] = x;
            }
        }
        res.objective = sol.objective;
    }
    res.lp = std::move(sol);
    return res;
}

}  // namespace detail

// Cheapest standing network under which every receiver can simultaneously be
// served `rate` units from the source (per-receiver flows share edge weights
// without summing -- the coded region). Optional `weight_caps` bound the
// purchasable weight per edge, as on the canonical unit-capacity butterfly;
// edges absent from the map are uncapped. Infeasible only when the rate
// exceeds the capped multicast capacity or a receiver is unreachable.
inline MulticastResult min_cost_coded_multicast(
    const Graph& g, const std::string& source, const std::vector<std::string>& receivers,
    double rate, const std::optional<CapacityMap>& weight_caps = std::nullopt,
    const lp::SolveOptions& opts = {}) {
    if (rate < 0) throw InputError("min_cost_coded_multicast: negative rate");
    if (receivers.empty()) throw InputError("min_cost_coded_multicast: no receivers");
    GraphIndex gi(g);
    auto built = detail::build_coded_lp(g, gi, source, receivers, rate, {},
                                        weight_caps ? &*weight_caps : nullptr);
    auto sol = lp::solve(built.model, opts);
    return detail::extract_multicast(g, gi, receivers, built, std::move(sol));
}

struct WelfareResult {
    lp::SolveStatus status = lp::SolveStatus::Optimal;
    double rate = 0.0;
    double cost = 0.0;
    double welfare = 0.0;  // benefit_per_unit * rate - cost
    Topology topology;
    lp::LpSolution lp;
};

// General form: concave piecewise-linear benefit given as segments with
// nonincreasing slopes. Without a finite total segment length the problem is
// legitimately Unbounded whenever the first slope exceeds the cheapest
// per-unit delivery cost; the improving ray is returned in that case.
inline WelfareResult optimize_welfare(const Graph& g, const std::string& source,
                                      const std::vector<std::string>& receivers,
                                      const std::vector<BenefitSegment>& benefit,
                                      const std::optional<CapacityMap>& weight_caps =
                                          std::nullopt,
                                      const lp::SolveOptions& opts = {}) {
    if (receivers.empty()) throw InputError("optimize_welfare: no receivers");
    if (benefit.empty()) throw InputError("optimize_welfare: empty benefit");
    for (std::size_t k = 0; k < benefit.size(); ++k) {
        if (benefit[k].slope < 0 || benefit[k].length < 0)
            throw InputError("optimize_welfare: negative benefit segment");
        if (k > 0 && benefit[k].slope > benefit[k - 1].slope + 1e-12)
            throw InputError("optimize_welfare: benefit must be concave "
                             "(nonincreasing slopes)");
    }
    GraphIndex gi(g);
    auto built = detail::build_coded_lp(g, gi, source, receivers, 0.0, benefit,
                                        weight_caps ? &*weight_caps : nullptr);
    auto sol = lp::solve(built.model, opts);
    WelfareResult res;
    res.status = sol.status;
    if (sol.status == lp::SolveStatus::Optimal) {
        const int E = gi.n_edges();
        double gain = 0.0;
        for (std::size_t k = 0; k < benefit.size(); ++k) {
            const double rk = sol.primal[built.rate_cols[k]];
            res.rate += rk;
            gain += benefit[k].slope * rk;
        }
        for (int e = 0; e < E; ++e) {
            res.topology.weights[g.edges[e].key()] = std::max(0.0, sol.primal[e]);
            res.cost += g.edges[e].cost * sol.primal[e];
        }
        res.welfare = gain - res.cost;
    }
    res.lp = std::move(sol);
    return res;
}

// Linear benefit in the rate, optionally capped by a rate ceiling.
inline WelfareResult optimize_welfare(const Graph& g, const std::string& source,
                                      const std::vector<std::string>& receivers,
                                      double benefit_per_unit,
                                      double rate_ceiling = lp::kInf,
                                      const std::optional<CapacityMap>& weight_caps =
                                          std::nullopt,
                                      const lp::SolveOptions& opts = {}) {
    if (benefit_per_unit < 0) throw InputError("optimize_welfare: negative benefit");
    return optimize_welfare(g, source, receivers,
                            std::vector<BenefitSegment>{{benefit_per_unit, rate_ceiling}},
                            weight_caps, opts);
}

struct ManagerValue {
    WelfareResult without_manager;
    WelfareResult with_manager;
    double delta = 0.0;  // welfare_with - welfare_without
};

// Welfare comparison of the firm topology with and without the middle
// manager. The manager only adds options, so delta is nonnegative up to
// solver tolerance.
inline ManagerValue manager_value(const FirmSpec& spec, double benefit_per_unit,
                                  double rate_ceiling,
                                  const lp::SolveOptions& opts = {}) {
    FirmSpec base = spec;
    ManagerValue mv;
    base.with_manager = false;
    Graph g0 = firm_topology(base);
    base.with_manager = true;
    Graph g1 = firm_topology(base);
    std::vector<std::string> receivers = g0.ids_of(NodeKind::Receiver);
    mv.without_manager = optimize_welfare(g0, "S", receivers, benefit_per_unit,
                                          rate_ceiling, std::nullopt, opts);
    mv.with_manager = optimize_welfare(g1, "S", receivers, benefit_per_unit,
                                       rate_ceiling, std::nullopt, opts);
    if (mv.without_manager.status != lp::SolveStatus::Optimal ||
        mv.with_manager.status != lp::SolveStatus::Optimal)
        throw InputError("manager_value: welfare optimization did not reach an optimum "
                         "(pass a finite rate ceiling)");
    mv.delta = mv.with_manager.welfare - mv.without_manager.welfare;
    return mv;
}

}  // namespace orgnet
