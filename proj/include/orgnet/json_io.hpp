#pragma once
// Problem and solution documents: one JSON schema for problems (nodes, edges,
// broadcasts, optional limits/importance) and one for solutions (weights,
// flows, certificates). Parsing is strict -- unknown fields are rejected with
// field-path diagnostics -- and serialization is deterministic: fixed array
// orders, insertion-ordered keys, floats rounded to 12 significant digits.
// Also the DOT export used for figure-style topology renderings.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orgnet/contingency.hpp"
#include "orgnet/core.hpp"

namespace orgnet::io {

using json = nlohmann::ordered_json;

// A problem file: the domain Problem plus the optional per-edge capacities
// used by the flow commands (kept separate so files round-trip exactly).
struct ParsedProblem {
    Problem problem;
    std::map<EdgeKey, double> explicit_capacities;

    bool operator==(const ParsedProblem&) const = default;
};

namespace detail {

// Round to 12 significant digits so serialized numbers are stable across
// reformatting round trips.
inline double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline void check_keys(const json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw InputError(where + ": unknown field '" + key + "'");
    }
}

inline double get_number(const json& obj, const std::string& where, const char* field) {
    if (!obj.contains(field))
        throw InputError(where + ": missing field '" + field + "'");
    if (!obj[field].is_number())
        throw InputError(where + ": field '" + field + "' must be a number");
    return obj[field].get<double>();
}

inline std::string get_string(const json& obj, const std::string& where, const char* field) {
    if (!obj.contains(field))
        throw InputError(where + ": missing field '" + field + "'");
    if (!obj[field].is_string())
        throw InputError(where + ": field '" + field + "' must be a string");
    return obj[field].get<std::string>();
}

}  // namespace detail

inline ParsedProblem problem_from_json(const json& doc) {
    using detail::check_keys;
    using detail::get_number;
    using detail::get_string;

    if (!doc.is_object()) throw InputError("problem: top level must be an object");
    check_keys(doc, "problem",
               {"nodes", "edges", "broadcasts", "sender_replication", "node_limits",
                "importance"});

    ParsedProblem out;
    Problem& p = out.problem;

    if (!doc.contains("nodes") || !doc["nodes"].is_array())
        throw InputError("problem: 'nodes' must be an array");
    int idx = 0;
    for (const auto& jn : doc["nodes"]) {
        const std::string where = "problem.nodes[" + std::to_string(idx++) + "]";
        if (!jn.is_object()) throw InputError(where + ": must be an object");
        check_keys(jn, where, {"id", "kind"});
        Node n;
        n.id = get_string(jn, where, "id");
        auto kind = node_kind_from_string(get_string(jn, where, "kind"));
        if (!kind)
            throw InputError(where + ": kind must be sender|relay|receiver");
        n.kind = *kind;
        p.graph.nodes.push_back(std::move(n));
    }

    if (!doc.contains("edges") || !doc["edges"].is_array())
        throw InputError("problem: 'edges' must be an array");
    idx = 0;
    for (const auto& je : doc["edges"]) {
        const std::string where = "problem.edges[" + std::to_string(idx++) + "]";
        if (!je.is_object()) throw InputError(where + ": must be an object");
        check_keys(je, where, {"from", "to", "cost", "capacity"});
        Edge e;
        e.from = get_string(je, where, "from");
        e.to = get_string(je, where, "to");
        e.cost = get_number(je, where, "cost");
        if (je.contains("capacity"))
            out.explicit_capacities[e.key()] = get_number(je, where, "capacity");
        p.graph.edges.push_back(std::move(e));
    }

    if (!doc.contains("broadcasts") || !doc["broadcasts"].is_array())
        throw InputError("problem: 'broadcasts' must be an array");
    idx = 0;
    for (const auto& jb : doc["broadcasts"]) {
        const std::string where = "problem.broadcasts[" + std::to_string(idx++) + "]";
        if (!jb.is_object()) throw InputError(where + ": must be an object");
        check_keys(jb, where, {"id", "messages"});
        Broadcast b;
        b.id = get_string(jb, where, "id");
        if (!jb.contains("messages") || !jb["messages"].is_array())
            throw InputError(where + ": 'messages' must be an array");
        int mi = 0;
        for (const auto& jm : jb["messages"]) {
            const std::string mw = where + ".messages[" + std::to_string(mi++) + "]";
            if (!jm.is_object()) throw InputError(mw + ": must be an object");
            check_keys(jm, mw, {"source", "receivers", "size"});
            Message m;
            m.source = get_string(jm, mw, "source");
            m.size = get_number(jm, mw, "size");
            if (!jm.contains("receivers") || !jm["receivers"].is_array())
                throw InputError(mw + ": 'receivers' must be an array");
            for (const auto& jr : jm["receivers"]) {
                if (!jr.is_string()) throw InputError(mw + ": receivers must be strings");
                m.receivers.push_back(jr.get<std::string>());
            }
            b.messages.push_back(std::move(m));
        }
        p.broadcasts.push_back(std::move(b));
    }

    if (doc.contains("sender_replication")) {
        const std::string mode = doc["sender_replication"].get<std::string>();
        if (mode == "strict") p.sender_replication = SenderReplication::Strict;
        else if (mode == "relaxed") p.sender_replication = SenderReplication::Relaxed;
        else throw InputError("problem: sender_replication must be strict|relaxed");
    }

    if (doc.contains("node_limits")) {
        if (!doc["node_limits"].is_object())
            throw InputError("problem: 'node_limits' must be an object");
        for (const auto& [id, jl] : doc["node_limits"].items()) {
            const std::string where = "problem.node_limits." + id;
            check_keys(jl, where, {"in", "out"});
            NodeLimit lim;
            if (jl.contains("in")) lim.in_capacity = get_number(jl, where, "in");
            if (jl.contains("out")) lim.out_capacity = get_number(jl, where, "out");
            p.node_limits[id] = lim;
        }
    }

    if (doc.contains("importance")) {
        if (!doc["importance"].is_array())
            throw InputError("problem: 'importance' must be an array");
        std::map<ImportanceKey, double> imp;
        idx = 0;
        for (const auto& ji : doc["importance"]) {
            const std::string where = "problem.importance[" + std::to_string(idx++) + "]";
            check_keys(ji, where, {"broadcast", "message", "receiver", "benefit"});
            const std::string bid = get_string(ji, where, "broadcast");
            if (!ji.contains("message") || !ji["message"].is_number_integer())
                throw InputError(where + ": 'message' must be an integer index");
            const int mi = ji["message"].get<int>();
            imp[{bid, mi, get_string(ji, where, "receiver")}] =
                get_number(ji, where, "benefit");
        }
        p.importance = std::move(imp);
    }

    return out;
}

inline json problem_to_json(const ParsedProblem& pp) {
    using detail::round12;
    const Problem& p = pp.problem;
    json doc;
    doc["nodes"] = json::array();
    for (const auto& n : p.graph.nodes)
        doc["nodes"].push_back({{"id", n.id}, {"kind", to_string(n.kind)}});
    doc["edges"] = json::array();
    for (const auto& e : p.graph.edges) {
        json je{{"from", e.from}, {"to", e.to}, {"cost", round12(e.cost)}};
        auto cap = pp.explicit_capacities.find(e.key());
        if (cap != pp.explicit_capacities.end()) je["capacity"] = round12(cap->second);
        doc["edges"].push_back(std::move(je));
    }
    doc["broadcasts"] = json::array();
    for (const auto& b : p.broadcasts) {
        json jb{{"id", b.id}, {"messages", json::array()}};
        for (const auto& m : b.messages) {
            json jm{{"source", m.source},
                    {"receivers", m.receivers},
                    {"size", round12(m.size)}};
            jb["messages"].push_back(std::move(jm));
        }
        doc["broadcasts"].push_back(std::move(jb));
    }
    doc["sender_replication"] =
        p.sender_replication == SenderReplication::Strict ? "strict" : "relaxed";
    if (!p.node_limits.empty()) {
        json jl = json::object();
        for (const auto& [id, lim] : p.node_limits) {
            json e = json::object();
            if (lim.in_capacity) e["in"] = round12(*lim.in_capacity);
            if (lim.out_capacity) e["out"] = round12(*lim.out_capacity);
            jl[id] = std::move(e);
        }
        doc["node_limits"] = std::move(jl);
    }
    if (p.importance) {
        json ji = json::array();
        for (const auto& [key, benefit] : *p.importance)
            ji.push_back({{"broadcast", std::get<0>(key)},
                          {"message", std::get<1>(key)},
                          {"receiver", std::get<2>(key)},
                          {"benefit", round12(benefit)}});
        doc["importance"] = std::move(ji);
    }
    return doc;
}

inline json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(what + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParsedProblem load_problem(const std::string& path) {
    return problem_from_json(parse_json_text(read_file(path), path));
}

// Capacities for the flow commands: explicit values where given, 1.0
// otherwise.
inline CapacityMap capacities_or_unit(const ParsedProblem& pp) {
    CapacityMap caps;
    for (const auto& e : pp.problem.graph.edges) {
        auto it = pp.explicit_capacities.find(e.key());
        caps[e.key()] = it == pp.explicit_capacities.end() ? 1.0 : it->second;
    }
    return caps;
}

// Weight caps for the multicast LPs: only explicitly declared capacities
// bound the purchasable weight; everything else stays uncapped.
inline std::optional<CapacityMap> weight_caps_if_declared(const ParsedProblem& pp) {
    if (pp.explicit_capacities.empty()) return std::nullopt;
    return pp.explicit_capacities;
}

// ---- Solution documents ----

struct SolutionDoc {
    lp::SolveStatus status = lp::SolveStatus::Optimal;
    bool weighted = false;
    SenderReplication mode = SenderReplication::Strict;
    double objective = 0.0;
    double cost = 0.0;
    Topology topology;
    FlowSet flows;
    std::map<ImportanceKey, double> delivered;
    std::vector<double> dual;
    std::vector<double> certificate;
};

inline json solution_to_json(const Problem& p, const ContingencyResult& res,
                             double tol_feas, double tol_gap) {
    using detail::round12;
    json doc;
    doc["status"] = lp::to_string(res.status);
    doc["mode"] =
        p.sender_replication == SenderReplication::Strict ? "strict" : "relaxed";
    doc["weighted"] = res.built.weighted;
    doc["tolerances"] = {{"feas", tol_feas}, {"gap", tol_gap}};
    doc["lp"] = {{"columns", res.built.model.n_vars},
                 {"rows", res.built.model.n_rows()},
                 {"iterations", res.lp.iterations}};
    if (res.status == lp::SolveStatus::Optimal) {
        doc["objective"] = round12(res.objective);
        doc["cost"] = round12(res.cost);
        doc["weights"] = json::array();
        for (const auto& e : p.graph.edges) {
            doc["weights"].push_back({{"from", e.from},
                                      {"to", e.to},
                                      {"weight", round12(res.topology.weights.at(e.key()))}});
        }
        json jmf = json::array();
        for (const auto& bc : p.broadcasts) {
            for (int mi = 0; mi < static_cast<int>(bc.messages.size()); ++mi) {
                for (const auto& e : p.graph.edges) {
                    auto it = res.flows.message_flows.find({bc.id, mi, e.key()});
                    if (it == res.flows.message_flows.end()) continue;
                    jmf.push_back({{"broadcast", bc.id},
                                   {"message", mi},
                                   {"from", e.from},
                                   {"to", e.to},
                                   {"flow", round12(it->second)}});
                }
            }
        }
        json jpf = json::array();
        for (const auto& bc : p.broadcasts) {
            for (int mi = 0; mi < static_cast<int>(bc.messages.size()); ++mi) {
                for (const auto& t : bc.messages[mi].receivers) {
                    for (const auto& e : p.graph.edges) {
                        auto it = res.flows.pair_flows.find({bc.id, mi, e.key(), t});
                        if (it == res.flows.pair_flows.end()) continue;
                        jpf.push_back({{"broadcast", bc.id},
                                       {"message", mi},
                                       {"receiver", t},
                                       {"from", e.from},
                                       {"to", e.to},
                                       {"flow", round12(it->second)}});
                    }
                }
            }
        }
        doc["flows"] = {{"message", std::move(jmf)}, {"pair", std::move(jpf)}};
        if (res.built.weighted) {
            json jd = json::array();
            for (const auto& [key, amount] : res.delivered)
                jd.push_back({{"broadcast", std::get<0>(key)},
                              {"message", std::get<1>(key)},
                              {"receiver", std::get<2>(key)},
                              {"amount", round12(amount)}});
            doc["delivered"] = std::move(jd);
        }
        json dual = json::array();
        for (double y : res.lp.dual) dual.push_back(round12(y));
        doc["certificates"] = {{"dual", std::move(dual)}};
    } else {
        json cert = json::array();
        for (double v : res.lp.certificate) cert.push_back(round12(v));
        doc["certificates"] =
            json{{res.status == lp::SolveStatus::Infeasible ? "farkas" : "ray",
                  std::move(cert)}};
    }
    return doc;
}

inline SolutionDoc solution_from_json(const json& doc) {
    using detail::get_number;
    using detail::get_string;
    SolutionDoc out;
    const std::string status = doc.at("status").get<std::string>();
    if (status == "optimal") out.status = lp::SolveStatus::Optimal;
    else if (status == "infeasible") out.status = lp::SolveStatus::Infeasible;
    else if (status == "unbounded") out.status = lp::SolveStatus::Unbounded;
    else throw InputError("solution: unknown status '" + status + "'");
    out.weighted = doc.value("weighted", false);
    out.mode = doc.value("mode", "strict") == std::string("relaxed")
                   ? SenderReplication::Relaxed
                   : SenderReplication::Strict;
    if (out.status != lp::SolveStatus::Optimal) {
        if (doc.contains("certificates")) {
            const auto& c = doc["certificates"];
            const char* key =
                out.status == lp::SolveStatus::Infeasible ? "farkas" : "ray";
            if (c.contains(key))
                for (const auto& v : c[key]) out.certificate.push_back(v.get<double>());
        }
        return out;
    }
    out.objective = doc.value("objective", 0.0);
    out.cost = doc.value("cost", 0.0);
    for (const auto& jw : doc.at("weights")) {
        const std::string where = "solution.weights";
        out.topology.weights[{get_string(jw, where, "from"), get_string(jw, where, "to")}] =
            get_number(jw, where, "weight");
    }
    if (doc.contains("flows")) {
        for (const auto& jf : doc["flows"].value("message", json::array())) {
            const std::string where = "solution.flows.message";
            out.flows.message_flows[{get_string(jf, where, "broadcast"),
                                     jf.at("message").get<int>(),
                                     {get_string(jf, where, "from"),
                                      get_string(jf, where, "to")}}] =
                get_number(jf, where, "flow");
        }
        for (const auto& jf : doc["flows"].value("pair", json::array())) {
            const std::string where = "solution.flows.pair";
            out.flows.pair_flows[{get_string(jf, where, "broadcast"),
                                  jf.at("message").get<int>(),
                                  {get_string(jf, where, "from"),
                                   get_string(jf, where, "to")},
                                  get_string(jf, where, "receiver")}] =
                get_number(jf, where, "flow");
        }
    }
    for (const auto& jd : doc.value("delivered", json::array())) {
        const std::string where = "solution.delivered";
        out.delivered[{get_string(jd, where, "broadcast"), jd.at("message").get<int>(),
                       get_string(jd, where, "receiver")}] = get_number(jd, where, "amount");
    }
    if (doc.contains("certificates") && doc["certificates"].contains("dual"))
        for (const auto& v : doc["certificates"]["dual"]) out.dual.push_back(v.get<double>());
    return out;
}

// ---- DOT export ----

// Graph (and optionally a solved topology) in DOT. Support edges are drawn
// solid with width scaled by weight; planned-away edges are dashed gray.
inline std::string to_dot(const Problem& p, const Topology* topo = nullptr) {
    char buf[256];
    std::string out = "digraph orgnet {\n  rankdir=LR;\n";
    for (const auto& n : p.graph.nodes) {
        const char* shape = n.kind == NodeKind::Sender ? "box"
                            : n.kind == NodeKind::Receiver ? "doublecircle"
                                                           : "ellipse";
        std::snprintf(buf, sizeof(buf), "  \"%s\" [shape=%s];\n", n.id.c_str(), shape);
        out += buf;
    }
    double wmax = 1.0;
    if (topo)
        for (const auto& [k, v] : topo->weights) wmax = std::max(wmax, v);
    for (const auto& e : p.graph.edges) {
        double w = -1.0;
        if (topo) {
            auto it = topo->weights.find(e.key());
            w = it == topo->weights.end() ? 0.0 : it->second;
        }
        if (!topo) {
            std::snprintf(buf, sizeof(buf), "  \"%s\" -> \"%s\" [label=\"%.6g\"];\n",
                          e.from.c_str(), e.to.c_str(), e.cost);
        } else if (w > 1e-9) {
            std::snprintf(buf, sizeof(buf),
                          "  \"%s\" -> \"%s\" [label=\"%.6g\", penwidth=%.2f, "
                          "color=\"#1f5fbf\"];\n",
                          e.from.c_str(), e.to.c_str(), w, 1.0 + 3.0 * w / wmax);
        } else {
            std::snprintf(buf, sizeof(buf),
                          "  \"%s\" -> \"%s\" [style=dashed, color=gray];\n",
                          e.from.c_str(), e.to.c_str());
        }
        out += buf;
    }
    out += "}\n";
    return out;
}

inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace orgnet::io
