#pragma once
// Organization graphs: nodes with sender/relay/receiver roles, costed directed
// edges, messages grouped into broadcasts, and problem instances tying them
// together. Everything here is a plain value type; objects are immutable by
// convention after construction and safe to share across threads.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace orgnet {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NodeKind { Sender, Relay, Receiver };

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Sender: return "sender";
        case NodeKind::Relay: return "relay";
        case NodeKind::Receiver: return "receiver";
    }
    return "?";
}

inline std::optional<NodeKind> node_kind_from_string(const std::string& s) {
    if (s == "sender") return NodeKind::Sender;
    if (s == "relay") return NodeKind::Relay;
    if (s == "receiver") return NodeKind::Receiver;
    return std::nullopt;
}

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Relay;

    bool operator==(const Node&) const = default;
};

// Edges are identified by their (from, to) pair; parallel edges are not allowed.
using EdgeKey = std::pair<std::string, std::string>;

struct Edge {
    std::string from;
    std::string to;
    double cost = 0.0;  // cost per unit weight

    EdgeKey key() const { return {from, to}; }
    bool operator==(const Edge&) const = default;
};

// A directed organization graph. Node and edge order is the declaration order
// and is kept stable: it defines the dense integer ids used internally and the
// ordering of all serialized output.
struct Graph {
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    const Node* find_node(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }

    std::vector<std::string> ids_of(NodeKind k) const {
        std::vector<std::string> out;
        for (const auto& n : nodes)
            if (n.kind == k) out.push_back(n.id);
        return out;
    }

    bool operator==(const Graph&) const = default;
};

// Dense integer view of a graph: node/edge indices in declaration order plus
// in/out adjacency lists. String ids remain the external identity; this is the
// stable string<->integer mapping used by the LP builders and solvers.
struct GraphIndex {
    const Graph* graph = nullptr;
    std::map<std::string, int> node_of;
    std::map<EdgeKey, int> edge_of;
    std::vector<std::vector<int>> out_edges;  // node index -> edge indices
    std::vector<std::vector<int>> in_edges;

    explicit GraphIndex(const Graph& g) : graph(&g) {
        for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
            if (!node_of.emplace(g.nodes[i].id, i).second)
                throw InputError("duplicate node id: " + g.nodes[i].id);
        }
        out_edges.assign(g.nodes.size(), {});
        in_edges.assign(g.nodes.size(), {});
        for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
            const Edge& ed = g.edges[e];
            if (!edge_of.emplace(ed.key(), e).second)
                throw InputError("duplicate edge: " + ed.from + "->" + ed.to);
            out_edges.at(node(ed.from)).push_back(e);
            in_edges.at(node(ed.to)).push_back(e);
        }
    }

    int node(const std::string& id) const {
        auto it = node_of.find(id);
        if (it == node_of.end()) throw InputError("unknown node id: " + id);
        return it->second;
    }

    int edge(const EdgeKey& k) const {
        auto it = edge_of.find(k);
        if (it == edge_of.end())
            throw InputError("unknown edge: " + k.first + "->" + k.second);
        return it->second;
    }

    NodeKind kind(int node_idx) const { return graph->nodes.at(node_idx).kind; }
    int n_nodes() const { return static_cast<int>(graph->nodes.size()); }
    int n_edges() const { return static_cast<int>(graph->edges.size()); }
};

// A message carries `size` units of information from one sender to every
// receiver in `receivers`.
struct Message {
    std::string source;
    std::vector<std::string> receivers;
    double size = 1.0;

    bool operator==(const Message&) const = default;
};

// Messages that must be communicated simultaneously share one broadcast and
// therefore compete for edge capacity.
struct Broadcast {
    std::string id;
    std::vector<Message> messages;

    bool operator==(const Broadcast&) const = default;
};

// Strict: the per-message flow leaving the source equals the message size
// (the source itself may not replicate). Relaxed: it may exceed it.
enum class SenderReplication { Strict, Relaxed };

struct NodeLimit {
    std::optional<double> in_capacity;
    std::optional<double> out_capacity;

    bool operator==(const NodeLimit&) const = default;
};

// (broadcast id, message index within broadcast, receiver id)
using ImportanceKey = std::tuple<std::string, int, std::string>;

struct Problem {
    Graph graph;
    std::vector<Broadcast> broadcasts;
    SenderReplication sender_replication = SenderReplication::Strict;
    std::map<std::string, NodeLimit> node_limits;
    std::optional<std::map<ImportanceKey, double>> importance;

    bool operator==(const Problem&) const = default;
};

// Cost assignment rule for the generated firm topologies, one cost per edge
// class.
struct FirmCosts {
    double source_to_observer = 1.0;
    double observer_to_receiver = 1.0;
    double observer_to_manager = 1.0;
    double manager_to_receiver = 1.0;

    bool operator==(const FirmCosts&) const = default;
};

struct FirmSpec {
    int n_observers = 1;
    int n_receivers = 1;
    bool with_manager = false;
    FirmCosts edge_costs;

    bool operator==(const FirmSpec&) const = default;
};

struct Violation {
    std::string code;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

namespace detail {

inline bool edge_class_allowed(NodeKind from, NodeKind to) {
    // Allowed classes: sender->receiver, sender->relay, relay->receiver,
    // relay->relay. Receivers never send; senders never receive.
    if (from == NodeKind::Receiver) return false;
    if (to == NodeKind::Sender) return false;
    if (from == NodeKind::Sender && to == NodeKind::Relay) return true;
    if (from == NodeKind::Sender && to == NodeKind::Receiver) return true;
    if (from == NodeKind::Relay) return true;
    return false;
}

}  // namespace detail

inline std::vector<Violation> validate_graph(const Graph& g) {
    std::vector<Violation> out;
    std::map<std::string, NodeKind> kinds;
    for (const auto& n : g.nodes) {
        if (n.id.empty()) out.push_back({"empty-node-id", "node with empty id"});
        if (!kinds.emplace(n.id, n.kind).second)
            out.push_back({"duplicate-node-id", n.id});
    }
    std::set<EdgeKey> seen;
    for (const auto& e : g.edges) {
        const std::string label = e.from + "->" + e.to;
        if (!seen.insert(e.key()).second)
            out.push_back({"duplicate-edge", label});
        if (e.from == e.to) out.push_back({"self-loop", label});
        if (!(e.cost >= 0.0)) out.push_back({"negative-cost", label});
        auto fi = kinds.find(e.from);
        auto ti = kinds.find(e.to);
        if (fi == kinds.end()) {
            out.push_back({"unknown-endpoint", e.from});
            continue;
        }
        if (ti == kinds.end()) {
            out.push_back({"unknown-endpoint", e.to});
            continue;
        }
        if (e.from != e.to && !detail::edge_class_allowed(fi->second, ti->second))
            out.push_back({"bad-edge-class", label + " (" + to_string(fi->second) +
                                                  "->" + to_string(ti->second) + ")"});
    }
    return out;
}

// Checks every domain invariant and returns one violation per defect, each
// with a machine-readable code. Pure: never mutates and never throws on bad
// input. An empty result means the problem is well formed.
inline std::vector<Violation> validate_problem(const Problem& p) {
    std::vector<Violation> out = validate_graph(p.graph);
    std::map<std::string, NodeKind> kinds;
    for (const auto& n : p.graph.nodes) kinds.emplace(n.id, n.kind);

    if (p.broadcasts.empty()) out.push_back({"no-broadcasts", ""});
    std::set<std::string> bids;
    for (const auto& b : p.broadcasts) {
        if (!bids.insert(b.id).second) out.push_back({"duplicate-broadcast-id", b.id});
        if (b.messages.empty()) out.push_back({"empty-broadcast", b.id});
        for (std::size_t mi = 0; mi < b.messages.size(); ++mi) {
            const Message& m = b.messages[mi];
            const std::string where = b.id + "/" + std::to_string(mi);
            auto src = kinds.find(m.source);
            if (src == kinds.end())
                out.push_back({"unknown-source", where + ": " + m.source});
            else if (src->second != NodeKind::Sender)
                out.push_back({"bad-source-kind", where + ": " + m.source});
            if (m.receivers.empty()) out.push_back({"empty-receivers", where});
            std::set<std::string> rset;
            for (const auto& r : m.receivers) {
                if (!rset.insert(r).second)
                    out.push_back({"duplicate-receiver", where + ": " + r});
                auto ri = kinds.find(r);
                if (ri == kinds.end())
                    out.push_back({"unknown-receiver", where + ": " + r});
                else if (ri->second != NodeKind::Receiver)
                    out.push_back({"bad-receiver-kind", where + ": " + r});
            }
            if (!(m.size > 0.0)) out.push_back({"nonpositive-size", where});
        }
    }

    for (const auto& [id, lim] : p.node_limits) {
        if (!kinds.count(id)) out.push_back({"unknown-limit-node", id});
        if (lim.in_capacity && !(*lim.in_capacity >= 0.0))
            out.push_back({"negative-limit", id + " (in)"});
        if (lim.out_capacity && !(*lim.out_capacity >= 0.0))
            out.push_back({"negative-limit", id + " (out)"});
    }

    if (p.importance) {
        for (const auto& [key, benefit] : *p.importance) {
            const auto& [bid, mi, rid] = key;
            const std::string where = bid + "/" + std::to_string(mi) + "/" + rid;
            const Broadcast* b = nullptr;
            for (const auto& cand : p.broadcasts)
                if (cand.id == bid) b = &cand;
            if (!b || mi < 0 || mi >= static_cast<int>(b->messages.size())) {
                out.push_back({"unknown-importance-ref", where});
            } else {
                const Message& m = b->messages[mi];
                bool found = false;
                for (const auto& r : m.receivers) found = found || r == rid;
                if (!found) out.push_back({"unknown-importance-ref", where});
            }
            if (!(benefit >= 0.0)) out.push_back({"negative-importance", where});
        }
    }
    return out;
}

// Throws InputError listing every violation code. Used as the precondition
// gate by the LP builders.
inline void require_valid(const Problem& p) {
    auto v = validate_problem(p);
    if (v.empty()) return;
    std::string msg = "invalid problem:";
    for (const auto& viol : v) {
        msg += " [" + viol.code;
        if (!viol.detail.empty()) msg += ": " + viol.detail;
        msg += "]";
    }
    throw InputError(msg);
}

using EdgeCostFn = std::function<double(const std::string& from, const std::string& to)>;

inline EdgeCostFn unit_costs() {
    return [](const std::string&, const std::string&) { return 1.0; };
}

// Builds the complete organization graph over the given node ids: every
// sender->receiver, sender->relay and relay->receiver pair plus every ordered
// relay pair (self-loops excluded; a self-loop can never carry useful flow).
// Edge order is those four classes in sequence, row-major within each class.
inline Graph build_graph(const std::vector<std::string>& senders,
                         const std::vector<std::string>& receivers,
                         const std::vector<std::string>& relays,
                         const EdgeCostFn& cost_fn) {
    Graph g;
    std::set<std::string> ids;
    auto add_nodes = [&](const std::vector<std::string>& group, NodeKind kind) {
        for (const auto& id : group) {
            if (!ids.insert(id).second)
                throw InputError("duplicate node id: " + id);
            g.nodes.push_back({id, kind});
        }
    };
    add_nodes(senders, NodeKind::Sender);
    add_nodes(receivers, NodeKind::Receiver);
    add_nodes(relays, NodeKind::Relay);

    auto add_edge = [&](const std::string& from, const std::string& to) {
        double c = cost_fn(from, to);
        if (!(c >= 0.0))
            throw InputError("negative edge cost: " + from + "->" + to);
        g.edges.push_back({from, to, c});
    };
    for (const auto& s : senders)
        for (const auto& t : receivers) add_edge(s, t);
    for (const auto& s : senders)
        for (const auto& r : relays) add_edge(s, r);
    for (const auto& r : relays)
        for (const auto& t : receivers) add_edge(r, t);
    for (const auto& a : relays)
        for (const auto& b : relays)
            if (a != b) add_edge(a, b);
    return g;
}

// Count-based overload; generates ids s0.., t0.., r0.. per node class.
inline Graph build_graph(int n_senders, int n_receivers, int n_relays,
                         const EdgeCostFn& cost_fn = unit_costs()) {
    if (n_senders < 0 || n_receivers < 0 || n_relays < 0)
        throw InputError("node counts must be nonnegative");
    auto make_ids = [](const char* prefix, int n) {
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
        return ids;
    };
    return build_graph(make_ids("s", n_senders), make_ids("t", n_receivers),
                       make_ids("r", n_relays), cost_fn);
}

// The two-layer firm of the network-coding model: an external source feeding
// observer relays I0..I(k-1), each connected to every receiver R0..R(n-1).
// With a manager, one extra relay M sits between all observers and all
// receivers. The I x R layer is complete since the exact link pattern is a
// modeling choice; costs come from the per-class assignment rule.
inline Graph firm_topology(const FirmSpec& spec) {
    if (spec.n_observers < 1 || spec.n_receivers < 1)
        throw InputError("firm spec requires at least one observer and one receiver");
    Graph g;
    g.nodes.push_back({"S", NodeKind::Sender});
    std::vector<std::string> observers, receivers;
    for (int i = 0; i < spec.n_observers; ++i) {
        observers.push_back("I" + std::to_string(i));
        g.nodes.push_back({observers.back(), NodeKind::Relay});
    }
    for (int j = 0; j < spec.n_receivers; ++j) {
        receivers.push_back("R" + std::to_string(j));
        g.nodes.push_back({receivers.back(), NodeKind::Receiver});
    }
    if (spec.with_manager) g.nodes.push_back({"M", NodeKind::Relay});

    const FirmCosts& c = spec.edge_costs;
    for (const auto& i : observers) g.edges.push_back({"S", i, c.source_to_observer});
    for (const auto& i : observers)
        for (const auto& r : receivers) g.edges.push_back({i, r, c.observer_to_receiver});
    if (spec.with_manager) {
        for (const auto& i : observers) g.edges.push_back({i, "M", c.observer_to_manager});
        for (const auto& r : receivers) g.edges.push_back({"M", r, c.manager_to_receiver});
    }
    return g;
}

}  // namespace orgnet
