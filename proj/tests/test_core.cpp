#include <catch2/catch_amalgamated.hpp>

#include "orgnet/core.hpp"
#include "orgnet/netcode.hpp"

using namespace orgnet;

namespace {

Problem butterfly_problem() {
    Problem p;
    p.graph = butterfly_graph();
    p.broadcasts = {{"b1", {{"S", {"R1", "R2"}, 2.0}}}};
    return p;
}

bool has_violation(const std::vector<Violation>& vs, const std::string& code) {
    for (const auto& v : vs)
        if (v.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("build_graph emits exactly the four pair classes") {
    CHECK(build_graph(1, 2, 2).edges.size() == 10);
    CHECK(build_graph(1, 1, 0).edges.size() == 1);
    CHECK(build_graph(2, 3, 2).edges.size() == 18);

    // Closed-form edge count for every count combination up to 4.
    for (int s = 0; s <= 4; ++s) {
        for (int t = 0; t <= 4; ++t) {
            for (int r = 0; r <= 4; ++r) {
                Graph g = build_graph(s, t, r);
                const std::size_t expect = s * t + s * r + r * t + r * (r - 1 < 0 ? 0 : r - 1);
                REQUIRE(g.edges.size() == expect);
                CHECK(validate_graph(g).empty());
                // no self-loops, endpoints exist
                for (const auto& e : g.edges) CHECK(e.from != e.to);
            }
        }
    }
}

TEST_CASE("build_graph rejects duplicate ids and negative costs") {
    CHECK_THROWS_AS(build_graph({"x", "x"}, {"t"}, {}, unit_costs()), InputError);
    CHECK_THROWS_AS(
        build_graph({"s"}, {"t"}, {}, [](const std::string&, const std::string&) {
            return -1.0;
        }),
        InputError);
}

TEST_CASE("firm_topology follows the construction rule") {
    const Graph plain = firm_topology({3, 2, false, {}});
    CHECK(plain.ids_of(NodeKind::Sender).size() == 1);
    CHECK(plain.ids_of(NodeKind::Relay).size() == 3);
    CHECK(plain.ids_of(NodeKind::Receiver).size() == 2);
    CHECK(plain.edges.size() == 9);

    CHECK(firm_topology({1, 1, false, {}}).edges.size() == 2);

    const Graph managed = firm_topology({3, 2, true, {}});
    CHECK(managed.edges.size() == 14);

    // The managed firm is a strict superset with identical costs on shared
    // edges.
    for (const auto& e : plain.edges) {
        bool found = false;
        for (const auto& me : managed.edges)
            if (me.key() == e.key()) {
                found = true;
                CHECK(me.cost == e.cost);
            }
        CHECK(found);
    }
    CHECK(managed.edges.size() > plain.edges.size());
    CHECK(validate_graph(managed).empty());
}

TEST_CASE("firm costs follow the per-class rule") {
    FirmCosts c{0.5, 4.0, 1.5, 2.5};
    const Graph g = firm_topology({2, 2, true, c});
    for (const auto& e : g.edges) {
        if (e.from == "S") CHECK(e.cost == 0.5);
        else if (e.to == "M") CHECK(e.cost == 1.5);
        else if (e.from == "M") CHECK(e.cost == 2.5);
        else CHECK(e.cost == 4.0);
    }
}

TEST_CASE("validate_problem reports machine-readable violations") {
    SECTION("well-formed butterfly is ok") {
        CHECK(validate_problem(butterfly_problem()).empty());
    }
    SECTION("empty receiver set") {
        Problem p = butterfly_problem();
        p.broadcasts[0].messages[0].receivers.clear();
        CHECK(has_violation(validate_problem(p), "empty-receivers"));
    }
    SECTION("source of the wrong kind") {
        Problem p = butterfly_problem();
        p.broadcasts[0].messages[0].source = "R1";
        CHECK(has_violation(validate_problem(p), "bad-source-kind"));
    }
    SECTION("receiver of the wrong kind") {
        Problem p = butterfly_problem();
        p.broadcasts[0].messages[0].receivers = {"V"};
        CHECK(has_violation(validate_problem(p), "bad-receiver-kind"));
    }
    SECTION("unknown nodes") {
        Problem p = butterfly_problem();
        p.broadcasts[0].messages[0].source = "nope";
        CHECK(has_violation(validate_problem(p), "unknown-source"));
    }
    SECTION("nonpositive size") {
        Problem p = butterfly_problem();
        p.broadcasts[0].messages[0].size = 0.0;
        CHECK(has_violation(validate_problem(p), "nonpositive-size"));
    }
    SECTION("no broadcasts") {
        Problem p = butterfly_problem();
        p.broadcasts.clear();
        CHECK(has_violation(validate_problem(p), "no-broadcasts"));
    }
    SECTION("bad edge class and self-loop") {
        Problem p = butterfly_problem();
        p.graph.edges.push_back({"R1", "R2", 1.0});
        p.graph.edges.push_back({"V", "V", 1.0});
        auto v = validate_problem(p);
        CHECK(has_violation(v, "bad-edge-class"));
        CHECK(has_violation(v, "self-loop"));
    }
    SECTION("duplicate edge") {
        Problem p = butterfly_problem();
        p.graph.edges.push_back({"S", "A", 2.0});
        CHECK(has_violation(validate_problem(p), "duplicate-edge"));
    }
    SECTION("limits and importance referencing unknowns") {
        Problem p = butterfly_problem();
        p.node_limits["nope"] = NodeLimit{1.0, 1.0};
        p.importance = std::map<ImportanceKey, double>{{{"b1", 5, "R1"}, 1.0}};
        auto v = validate_problem(p);
        CHECK(has_violation(v, "unknown-limit-node"));
        CHECK(has_violation(v, "unknown-importance-ref"));
    }
}

TEST_CASE("validate_problem is pure and idempotent") {
    Problem p = butterfly_problem();
    p.broadcasts[0].messages[0].receivers = {};
    const Problem copy = p;
    const auto v1 = validate_problem(p);
    const auto v2 = validate_problem(p);
    CHECK(v1 == v2);
    CHECK(p == copy);
}

TEST_CASE("GraphIndex provides the stable dense mapping") {
    Graph g = butterfly_graph();
    GraphIndex gi(g);
    CHECK(gi.n_nodes() == 7);
    CHECK(gi.n_edges() == 9);
    CHECK(gi.node("S") == 0);  // declaration order
    CHECK(gi.edge({"S", "A"}) == 0);
    CHECK(gi.out_edges[gi.node("S")].size() == 2);
    CHECK(gi.in_edges[gi.node("R1")].size() == 2);
    CHECK_THROWS_AS(gi.node("nope"), InputError);
}
