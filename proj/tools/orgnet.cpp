// Command-line front end: solve and verify contingency problems, compute
// multicast capacities and welfare-optimal topologies, compare manager
// configurations, and print the butterfly coding demo. One solve per
// invocation; machine status is the exit code (0 optimal/ok, 1 input error,
// 2 infeasible, 3 unbounded, 4 verification failure).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orgnet/contingency.hpp"
#include "orgnet/core.hpp"
#include "orgnet/json_io.hpp"
#include "orgnet/multicast.hpp"
#include "orgnet/netcode.hpp"
#include "orgnet/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUnbounded = 3;
constexpr int kExitVerifyFail = 4;

struct OutputSink {
    std::string path;  // empty: stdout
    bool quiet = false;

    void write(const std::string& text) const {
        if (!path.empty()) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw orgnet::InputError("cannot write file: " + path);
            out << text;
        } else if (!quiet) {
            std::fputs(text.c_str(), stdout);
        }
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

orgnet::lp::SolveOptions solve_options(double tol_feas, double tol_gap) {
    orgnet::lp::SolveOptions opts;
    opts.tol_feas = tol_feas;
    opts.tol_gap = tol_gap;
    if (const char* cap = std::getenv("ORGNET_ITER_CAP"))
        opts.iter_cap = std::strtol(cap, nullptr, 10);
    return opts;
}

int status_exit(orgnet::lp::SolveStatus s) {
    switch (s) {
        case orgnet::lp::SolveStatus::Optimal: return kExitOk;
        case orgnet::lp::SolveStatus::Infeasible: return kExitInfeasible;
        case orgnet::lp::SolveStatus::Unbounded: return kExitUnbounded;
    }
    return kExitInput;
}

std::string pick_source(const orgnet::Problem& p, std::string requested) {
    if (!requested.empty()) return requested;
    auto senders = p.graph.ids_of(orgnet::NodeKind::Sender);
    if (senders.size() != 1)
        throw orgnet::InputError("--source required (problem has " +
                                 std::to_string(senders.size()) + " senders)");
    return senders[0];
}

std::vector<std::string> pick_receivers(const orgnet::Problem& p,
                                        std::vector<std::string> requested) {
    if (!requested.empty()) return requested;
    auto receivers = p.graph.ids_of(orgnet::NodeKind::Receiver);
    if (receivers.empty()) throw orgnet::InputError("problem has no receiver nodes");
    return receivers;
}

void apply_mode(orgnet::Problem& p, const std::string& mode) {
    if (mode.empty()) return;
    if (mode == "strict") p.sender_replication = orgnet::SenderReplication::Strict;
    else if (mode == "relaxed") p.sender_replication = orgnet::SenderReplication::Relaxed;
    else throw orgnet::InputError("--mode must be strict or relaxed");
}

int cmd_solve_contingency(const std::string& input, const std::string& mode, bool weighted,
                          double tol_feas, double tol_gap, const std::string& format,
                          const OutputSink& sink) {
    using namespace orgnet;
    io::ParsedProblem pp = io::load_problem(input);
    apply_mode(pp.problem, mode);
    auto violations = validate_problem(pp.problem);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::fprintf(stderr, "invalid problem: %s (%s)\n", v.code.c_str(),
                         v.detail.c_str());
        return kExitInput;
    }
    const auto opts = solve_options(tol_feas, tol_gap);
    ContingencyResult res = weighted ? solve_weighted_delivery(pp.problem, opts)
                                     : solve_contingency(pp.problem, opts);
    if (format == "json") {
        sink.write(io::dump(io::solution_to_json(pp.problem, res, tol_feas, tol_gap)));
    } else if (format == "dot") {
        if (res.status != lp::SolveStatus::Optimal)
            throw InputError("dot output requires an optimal solution");
        sink.write(io::to_dot(pp.problem, &res.topology));
    } else {
        std::string text = std::string("status: ") + lp::to_string(res.status) + "\n";
        if (res.status == lp::SolveStatus::Optimal) {
            text += (res.built.weighted ? "net benefit: " : "objective: ") +
                    fmt(res.objective) + "\n";
            text += "cost: " + fmt(res.cost) + "\n";
            text += extract_report(pp.problem, res.topology, res.flows).text();
        } else if (res.status == lp::SolveStatus::Infeasible) {
            text += "farkas certificate over rows:";
            for (double y : res.lp.certificate) text += " " + fmt(y);
            text += "\n";
        }
        sink.write(text);
    }
    return status_exit(res.status);
}

int cmd_maxflow(const std::string& input, const std::string& source,
                const std::string& sink_node, const std::string& format,
                const OutputSink& sink) {
    using namespace orgnet;
    io::ParsedProblem pp = io::load_problem(input);
    auto caps = io::capacities_or_unit(pp);
    auto res = max_flow(pp.problem.graph, caps, pick_source(pp.problem, source), sink_node);
    if (format == "json") {
        io::json doc;
        doc["value"] = io::detail::round12(res.value);
        doc["cut_value"] = io::detail::round12(res.cut_value);
        doc["cut_nodes"] = res.cut_nodes;
        io::json flow = io::json::array();
        for (const auto& e : pp.problem.graph.edges) {
            double f = res.flow.at(e.key());
            if (f > 1e-12)
                flow.push_back({{"from", e.from}, {"to", e.to},
                                {"flow", io::detail::round12(f)}});
        }
        doc["flow"] = std::move(flow);
        sink.write(io::dump(doc));
    } else {
        sink.write(fmt(res.value) + "\n");
    }
    return kExitOk;
}

int cmd_capacity(const std::string& input, const std::string& source,
                 const std::vector<std::string>& receivers, const std::string& format,
                 const OutputSink& sink) {
    using namespace orgnet;
    io::ParsedProblem pp = io::load_problem(input);
    auto caps = io::capacities_or_unit(pp);
    const double rate =
        multicast_capacity(pp.problem.graph, caps, pick_source(pp.problem, source),
                           pick_receivers(pp.problem, receivers));
    if (format == "json") {
        io::json doc;
        doc["capacity"] = io::detail::round12(rate);
        sink.write(io::dump(doc));
    } else {
        sink.write(fmt(rate) + "\n");
    }
    return kExitOk;
}

int cmd_solve_multicast(const std::string& input, const std::string& source,
                        const std::vector<std::string>& receivers, double rate,
                        double benefit, double rate_ceiling, double tol_feas,
                        double tol_gap, const std::string& format, const OutputSink& sink) {
    using namespace orgnet;
    io::ParsedProblem pp = io::load_problem(input);
    const auto src = pick_source(pp.problem, source);
    const auto rcv = pick_receivers(pp.problem, receivers);
    const auto caps = io::weight_caps_if_declared(pp);
    const auto opts = solve_options(tol_feas, tol_gap);

    if (rate >= 0 && benefit >= 0)
        throw InputError("pass exactly one of --rate or --benefit");
    if (rate >= 0) {
        auto res = min_cost_coded_multicast(pp.problem.graph, src, rcv, rate, caps, opts);
        if (format == "json") {
            io::json doc;
            doc["status"] = lp::to_string(res.status);
            if (res.status == lp::SolveStatus::Optimal) {
                doc["objective"] = io::detail::round12(res.objective);
                io::json jw = io::json::array();
                for (const auto& e : pp.problem.graph.edges)
                    jw.push_back({{"from", e.from}, {"to", e.to},
                                  {"weight",
                                   io::detail::round12(res.topology.weights.at(e.key()))}});
                doc["weights"] = std::move(jw);
            }
            sink.write(io::dump(doc));
        } else if (format == "dot") {
            if (res.status != lp::SolveStatus::Optimal)
                throw InputError("dot output requires an optimal solution");
            sink.write(io::to_dot(pp.problem, &res.topology));
        } else {
            std::string text = std::string("status: ") + lp::to_string(res.status) + "\n";
            if (res.status == lp::SolveStatus::Optimal)
                text += "objective: " + fmt(res.objective) + "\n";
            sink.write(text);
        }
        return status_exit(res.status);
    }
    if (benefit < 0) throw InputError("pass exactly one of --rate or --benefit");
    auto res = optimize_welfare(pp.problem.graph, src, rcv, benefit, rate_ceiling, caps,
                                opts);
    if (format == "json") {
        io::json doc;
        doc["status"] = lp::to_string(res.status);
        if (res.status == lp::SolveStatus::Optimal) {
            doc["rate"] = io::detail::round12(res.rate);
            doc["cost"] = io::detail::round12(res.cost);
            doc["welfare"] = io::detail::round12(res.welfare);
        }
        sink.write(io::dump(doc));
    } else if (format == "dot") {
        if (res.status != lp::SolveStatus::Optimal)
            throw InputError("dot output requires an optimal solution");
        sink.write(io::to_dot(pp.problem, &res.topology));
    } else {
        std::string text = std::string("status: ") + lp::to_string(res.status) + "\n";
        if (res.status == lp::SolveStatus::Optimal) {
            text += "rate: " + fmt(res.rate) + "\ncost: " + fmt(res.cost) +
                    "\nwelfare: " + fmt(res.welfare) + "\n";
        } else if (res.status == lp::SolveStatus::Unbounded) {
            text += "welfare grows without bound; pass --rate-ceiling to cap the rate\n";
        }
        sink.write(text);
    }
    return status_exit(res.status);
}

int cmd_manager_value(int observers, int receivers, double benefit, double ceiling,
                      const orgnet::FirmCosts& costs, double tol_feas, double tol_gap,
                      const std::string& format, const OutputSink& sink) {
    using namespace orgnet;
    FirmSpec spec{observers, receivers, false, costs};
    auto mv = manager_value(spec, benefit, ceiling, solve_options(tol_feas, tol_gap));
    if (format == "json") {
        io::json doc;
        doc["welfare_without"] = io::detail::round12(mv.without_manager.welfare);
        doc["welfare_with"] = io::detail::round12(mv.with_manager.welfare);
        doc["delta"] = io::detail::round12(mv.delta);
        sink.write(io::dump(doc));
    } else {
        sink.write("welfare_without: " + fmt(mv.without_manager.welfare) +
                   "\nwelfare_with: " + fmt(mv.with_manager.welfare) +
                   "\ndelta: " + fmt(mv.delta) + "\n");
    }
    return kExitOk;
}

int cmd_demo_butterfly(const std::string& format, const OutputSink& sink) {
    using namespace orgnet;
    auto code = butterfly_xor_code();
    if (format == "dot") {
        Problem p;
        p.graph = code.graph;
        sink.write(io::to_dot(p));
        return kExitOk;
    }
    std::string text = "butterfly network code (2 source bits, XOR at V)\n\n";
    text += "global coding vectors (a,b):\n";
    auto vec = propagate(code);
    for (const auto& e : code.graph.edges) {
        const auto v = vec.at(e.key());
        text += "  " + e.from + "->" + e.to + "  (" + std::to_string(v & 1) + "," +
                std::to_string((v >> 1) & 1) + ")\n";
    }
    text += "\ntruth table (edge bits for each input):\n  a b |";
    for (const auto& e : code.graph.edges) text += " " + e.from + ">" + e.to;
    text += "\n";
    for (std::uint64_t bits = 0; bits < 4; ++bits) {
        auto eb = evaluate(code, bits);
        text += "  " + std::to_string(bits & 1) + " " + std::to_string((bits >> 1) & 1) +
                " |";
        for (const auto& e : code.graph.edges) {
            const std::string label = e.from + ">" + e.to;
            text += "  " + std::to_string(eb.at(e.key()));
            text += std::string(label.size() > 2 ? label.size() - 2 : 0, ' ');
        }
        text += "\n";
    }
    for (const char* r : {"R1", "R2"}) {
        auto dec = decodable(code, r);
        text += std::string("\ndecoder at ") + r + ": " +
                (dec.decodable ? "decodable" : "not decodable") + "\n";
        for (std::size_t i = 0; i < dec.rows.size(); ++i) {
            text += std::string("  bit ") + (i == 0 ? "a" : "b") + " = XOR of {";
            bool first = true;
            for (std::size_t j = 0; j < dec.in_edges.size(); ++j) {
                if (dec.rows[i] & (1ull << j)) {
                    if (!first) text += ", ";
                    text += dec.in_edges[j].first + "->" + dec.in_edges[j].second;
                    first = false;
                }
            }
            text += "}\n";
        }
    }
    text += "\ncopy-and-forward at V (no coding):\n";
    int best = 0;
    for (const auto& cf : butterfly_copy_forward_codes()) {
        const auto rule = cf.local_rules.at({"V", "W"});
        const int n = decodable(cf, "R1").decodable + decodable(cf, "R2").decodable;
        best = std::max(best, n);
        text += "  V forwards " +
                std::string(rule == 1 ? "its A-side input" :
                            rule == 2 ? "its B-side input" : "nothing") +
                ": " + std::to_string(n) + " of 2 receivers decodable\n";
    }
    text += "  -> no copy-and-forward choice serves both receivers; XOR serves both\n";
    sink.write(text);
    return best <= 1 ? kExitOk : kExitVerifyFail;
}

int cmd_verify(const std::string& problem_path, const std::string& solution_path,
               double tol_feas, const OutputSink& sink) {
    using namespace orgnet;
    io::ParsedProblem pp = io::load_problem(problem_path);
    io::SolutionDoc sol = io::solution_from_json(
        io::parse_json_text(io::read_file(solution_path), solution_path));
    if (sol.status != lp::SolveStatus::Optimal)
        throw InputError("verify requires an optimal solution document");
    Problem p = pp.problem;
    p.sender_replication = sol.mode;
    for (const auto& [key, w] : sol.topology.weights)
        if (!std::count_if(p.graph.edges.begin(), p.graph.edges.end(),
                           [&](const Edge& e) { return e.key() == key; }))
            throw InputError("solution references unknown edge " + key.first + "->" +
                             key.second);
    auto rep = oracle::recheck_appendix_constraints(
        p, sol.topology, sol.flows, tol_feas,
        sol.weighted ? std::optional(sol.delivered) : std::nullopt);
    std::string text = std::string(rep.pass ? "PASS" : "FAIL") +
                       " worst residual " + fmt(rep.worst_residual) + "\n";
    if (!rep.pass && rep.witness) text += "witness: " + *rep.witness + "\n";
    sink.write(text);
    return rep.pass ? kExitOk : kExitVerifyFail;
}

int cmd_export_lp(const std::string& input, const std::string& mode, bool weighted,
                  const OutputSink& sink) {
    using namespace orgnet;
    io::ParsedProblem pp = io::load_problem(input);
    apply_mode(pp.problem, mode);
    ContingencyLp built = weighted ? build_weighted_lp(pp.problem) : build_lp(pp.problem);
    sink.write(lp::to_lp_format(built.model,
                                [&](int j) { return built.col_name(j); }));
    return kExitOk;
}

// Deterministic scaling-problem generator: one sender, `relays` relays,
// `receivers` receivers, complete class edges, `broadcasts` broadcasts each
// with one message to `fanout` receivers chosen by the seeded RNG.
int cmd_generate(int receivers, int relays, int broadcasts, int fanout,
                 unsigned long seed, const OutputSink& sink) {
    using namespace orgnet;
    if (receivers < 1 || broadcasts < 1 || fanout < 1 || fanout > receivers)
        throw InputError("generate: need receivers >= fanout >= 1, broadcasts >= 1");
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::uniform_int_distribution<int> cost(1, 5), pick(0, receivers - 1);
    Graph g = build_graph(1, receivers, relays, [&](const std::string&, const std::string&) {
        return static_cast<double>(cost(rng));
    });
    Problem p;
    p.graph = g;
    for (int b = 0; b < broadcasts; ++b) {
        Message m;
        m.source = "s0";
        m.size = 1.0 + (b % 2);
        std::set<std::string> chosen;
        while (static_cast<int>(chosen.size()) < fanout)
            chosen.insert("t" + std::to_string(pick(rng)));
        m.receivers.assign(chosen.begin(), chosen.end());
        p.broadcasts.push_back({"b" + std::to_string(b), {m}});
    }
    p.sender_replication =
        relays > 0 ? SenderReplication::Strict : SenderReplication::Relaxed;
    io::ParsedProblem pp;
    pp.problem = std::move(p);
    sink.write(io::dump(io::problem_to_json(pp)));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"organization communication-network optimizer"};
    app.require_subcommand(1);

    std::string input, output, format = "table", mode, source, sink_node;
    std::string problem_path, solution_path;
    std::vector<std::string> receivers;
    bool quiet = false, weighted = false;
    double tol_feas = 1e-8, tol_gap = 1e-6;
    double rate = -1.0, benefit = -1.0, rate_ceiling = orgnet::lp::kInf;
    int n_observers = 3, n_receivers = 3, n_relays = 8, n_broadcasts = 40, fanout = 3;
    unsigned long seed = 1;
    orgnet::FirmCosts costs;
    std::string demo_name = "butterfly";

    auto add_common = [&](CLI::App* cmd, bool with_format = true) {
        cmd->add_option("--output", output, "write output to this file");
        cmd->add_flag("--quiet", quiet, "suppress stdout");
        if (with_format)
            cmd->add_option("--format", format, "output format")
                ->check(CLI::IsMember({"json", "table", "dot"}));
    };
    auto add_tols = [&](CLI::App* cmd) {
        cmd->add_option("--tol-feas", tol_feas, "feasibility tolerance")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tol-gap", tol_gap, "duality-gap tolerance")
            ->check(CLI::PositiveNumber);
    };

    auto* sc = app.add_subcommand("solve-contingency",
                                  "solve the minimum-cost contingency plan");
    sc->add_option("input", input, "problem file (JSON)")->required();
    sc->add_option("--mode", mode, "override sender replication (strict|relaxed)");
    sc->add_flag("--weighted", weighted,
                 "trade delivery benefit against cost (requires importance)");
    add_tols(sc);
    add_common(sc);

    auto* mf = app.add_subcommand("maxflow", "max flow between two nodes");
    mf->add_option("input", input, "problem file (JSON)")->required();
    mf->add_option("--source", source, "source node (default: the single sender)");
    mf->add_option("--sink", sink_node, "sink node")->required();
    add_common(mf);

    auto* cap = app.add_subcommand("capacity", "coding-achievable multicast capacity");
    cap->add_option("input", input, "problem file (JSON)")->required();
    cap->add_option("--source", source, "source node (default: the single sender)");
    cap->add_option("--receivers", receivers, "receiver nodes (default: all receivers)")
        ->delimiter(',');
    add_common(cap);

    auto* sm = app.add_subcommand("solve-multicast",
                                  "min-cost coded multicast or welfare optimum");
    sm->add_option("input", input, "problem file (JSON)")->required();
    sm->add_option("--source", source, "source node (default: the single sender)");
    sm->add_option("--receivers", receivers, "receiver nodes (default: all receivers)")
        ->delimiter(',');
    sm->add_option("--rate", rate, "multicast rate (min-cost mode)");
    sm->add_option("--benefit", benefit, "benefit per unit rate (welfare mode)");
    sm->add_option("--rate-ceiling", rate_ceiling, "cap on the rate (welfare mode)");
    add_tols(sm);
    add_common(sm);

    auto* mv = app.add_subcommand("manager-value",
                                  "welfare with vs without a middle manager");
    mv->add_option("--observers", n_observers, "number of observer relays")
        ->check(CLI::PositiveNumber);
    mv->add_option("--receivers", n_receivers, "number of receivers")
        ->check(CLI::PositiveNumber);
    mv->add_option("--benefit", benefit, "benefit per unit rate")->required();
    mv->add_option("--ceiling", rate_ceiling, "rate ceiling")->required();
    mv->add_option("--cost-source-observer", costs.source_to_observer, "edge-class cost");
    mv->add_option("--cost-observer-receiver", costs.observer_to_receiver,
                   "edge-class cost");
    mv->add_option("--cost-observer-manager", costs.observer_to_manager,
                   "edge-class cost");
    mv->add_option("--cost-manager-receiver", costs.manager_to_receiver,
                   "edge-class cost");
    add_tols(mv);
    add_common(mv);

    auto* demo = app.add_subcommand("demo", "built-in demonstrations");
    demo->add_option("name", demo_name, "demo name")->check(CLI::IsMember({"butterfly"}));
    add_common(demo);

    auto* ver = app.add_subcommand("verify",
                                   "independent constraint recheck of a solution");
    ver->add_option("--problem", problem_path, "problem file")->required();
    ver->add_option("--solution", solution_path, "solution file")->required();
    ver->add_option("--tol-feas", tol_feas, "residual tolerance")
        ->check(CLI::PositiveNumber);
    add_common(ver, false);

    auto* ex = app.add_subcommand("export-lp", "write the LP in LP text format");
    ex->add_option("input", input, "problem file (JSON)")->required();
    ex->add_option("--mode", mode, "override sender replication (strict|relaxed)");
    ex->add_flag("--weighted", weighted, "export the weighted-delivery LP");
    add_common(ex, false);

    auto* gen = app.add_subcommand("generate", "generate a scaling benchmark problem");
    gen->add_option("--receivers", n_receivers, "receiver count")->check(CLI::PositiveNumber);
    gen->add_option("--relays", n_relays, "relay count");
    gen->add_option("--broadcasts", n_broadcasts, "broadcast count")
        ->check(CLI::PositiveNumber);
    gen->add_option("--fanout", fanout, "receivers per message")->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed, "RNG seed");
    add_common(gen, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    OutputSink sink{output, quiet};
    try {
        if (app.got_subcommand(sc))
            return cmd_solve_contingency(input, mode, weighted, tol_feas, tol_gap, format,
                                         sink);
        if (app.got_subcommand(mf)) return cmd_maxflow(input, source, sink_node, format, sink);
        if (app.got_subcommand(cap))
            return cmd_capacity(input, source, receivers, format, sink);
        if (app.got_subcommand(sm))
            return cmd_solve_multicast(input, source, receivers, rate, benefit,
                                       rate_ceiling, tol_feas, tol_gap, format, sink);
        if (app.got_subcommand(mv))
            return cmd_manager_value(n_observers, n_receivers, benefit, rate_ceiling,
                                     costs, tol_feas, tol_gap, format, sink);
        if (app.got_subcommand(demo)) return cmd_demo_butterfly(format, sink);
        if (app.got_subcommand(ver))
            return cmd_verify(problem_path, solution_path, tol_feas, sink);
        if (app.got_subcommand(ex)) return cmd_export_lp(input, mode, weighted, sink);
        if (app.got_subcommand(gen))
            return cmd_generate(n_receivers, n_relays, n_broadcasts, fanout, seed, sink);
    } catch (const orgnet::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const orgnet::ResourceError& e) {
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
