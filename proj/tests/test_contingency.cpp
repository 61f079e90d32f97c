#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "generators.hpp"
#include "orgnet/contingency.hpp"
#include "orgnet/oracle.hpp"
#include "problem_fixtures.hpp"

using namespace orgnet;
using testfix::butterfly_problem;
using testfix::single_edge_problem;
using testfix::two_paths_problem;

namespace {

// Column count the long way: one w per edge, one f per (b,m,edge), one fhat
// per (b,m,t,edge).
int enumerate_columns(const Problem& p) {
    const int E = static_cast<int>(p.graph.edges.size());
    int cols = E;
    for (const auto& b : p.broadcasts)
        for (const auto& m : b.messages) cols += E + static_cast<int>(m.receivers.size()) * E;
    return cols;
}

}  // namespace

TEST_CASE("butterfly LP has the documented column layout") {
    const Problem p = butterfly_problem();
    const ContingencyLp built = build_lp(p);
    CHECK(built.model.n_vars == 36);  // 9 + 9 + 18
    CHECK(built.model.n_vars == enumerate_columns(p));

    // VarIndex is a bijection: decode agrees with the forward maps.
    const VarIndex& vx = built.vars;
    for (int e = 0; e < vx.n_edges; ++e) {
        const auto& r = vx.decode(vx.w(e));
        CHECK(r.kind == VarIndex::Kind::Weight);
        CHECK(r.e == e);
    }
    for (int e = 0; e < vx.n_edges; ++e) {
        const auto& r = vx.decode(vx.f(0, 0, e));
        CHECK(r.kind == VarIndex::Kind::MessageFlow);
        CHECK(r.b == 0);
        CHECK(r.e == e);
        const auto& rh = vx.decode(vx.fhat(0, 0, 1, e));
        CHECK(rh.kind == VarIndex::Kind::PairFlow);
        CHECK(rh.t == 1);
        CHECK(rh.e == e);
    }
    CHECK(static_cast<int>(vx.col_refs.size()) == built.model.n_vars);

    // Row bookkeeping covers every emitted row.
    CHECK(static_cast<int>(built.rows.size()) == built.model.n_rows());
}

TEST_CASE("column count formula matches enumeration on random problems") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const Problem p = testgen::random_problem(rng);
        const ContingencyLp built = build_lp(p);
        CHECK(built.model.n_vars == enumerate_columns(p));
    }
}

TEST_CASE("single-edge problem forces unit weight") {
    const Problem p = single_edge_problem();
    const ContingencyResult res = solve_contingency(p);
    REQUIRE(res.status == lp::SolveStatus::Optimal);
    CHECK(res.objective == Catch::Approx(1.0).margin(1e-8));
    CHECK(res.topology.weights.at({"S", "T"}) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("butterfly contingency optimum is 9 in strict mode") {
    const Problem p = butterfly_problem();
    const ContingencyResult res = solve_contingency(p);
    REQUIRE(res.status == lp::SolveStatus::Optimal);
    CHECK(res.objective == Catch::Approx(9.0).margin(1e-6));

    const auto rep = oracle::recheck_appendix_constraints(p, res.topology, res.flows);
    CHECK(rep.pass);
    CHECK(rep.worst_residual <= 1e-8);

    const auto report = extract_report(p, res.topology, res.flows);
    CHECK(report.support.size() == 9);
    for (const auto& se : report.support)
        CHECK(se.utilization == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("disjoint paths: strict infeasible with certificate, relaxed costs 8") {
    const Problem strict = two_paths_problem(SenderReplication::Strict);
    const ContingencyResult rs = solve_contingency(strict);
    REQUIRE(rs.status == lp::SolveStatus::Infeasible);
    const ContingencyLp built = build_lp(strict);
    CHECK(lp::farkas_margin(built.model, rs.lp.certificate, 1e-7) > 0.0);

    const Problem relaxed = two_paths_problem(SenderReplication::Relaxed);
    const ContingencyResult rr = solve_contingency(relaxed);
    REQUIRE(rr.status == lp::SolveStatus::Optimal);
    CHECK(rr.objective == Catch::Approx(8.0).margin(1e-6));
    CHECK(rr.topology.support().size() == 4);
    CHECK(oracle::recheck_appendix_constraints(relaxed, rr.topology, rr.flows).pass);

    const auto report = extract_report(relaxed, rr.topology, rr.flows);
    CHECK(report.support.size() == 4);
}

TEST_CASE("weighted delivery") {
    SECTION("zero importance everywhere: empty network, zero benefit") {
        Problem p = butterfly_problem();
        p.importance = std::map<ImportanceKey, double>{{{"b1", 0, "R1"}, 0.0},
                                                       {{"b1", 0, "R2"}, 0.0}};
        const ContingencyResult res = solve_weighted_delivery(p);
        REQUIRE(res.status == lp::SolveStatus::Optimal);
        CHECK(res.objective == Catch::Approx(0.0).margin(1e-9));
        CHECK(res.topology.support().empty());
    }
    SECTION("single edge: deliver iff the benefit covers the cost") {
        for (double benefit : {0.25, 0.75, 2.0, 5.0}) {
            const double cost = 1.0;
            Problem p = single_edge_problem(cost);
            p.importance = std::map<ImportanceKey, double>{{{"b1", 0, "T"}, benefit}};
            const ContingencyResult res = solve_weighted_delivery(p);
            REQUIRE(res.status == lp::SolveStatus::Optimal);
            CHECK(res.objective ==
                  Catch::Approx(std::max(benefit - cost, 0.0)).margin(1e-8));
            const double delivered = res.delivered.at({"b1", 0, "T"});
            CHECK(delivered == Catch::Approx(benefit > cost ? 1.0 : 0.0).margin(1e-8));
        }
    }
    SECTION("butterfly with importance 10: full delivery, net benefit 31") {
        Problem p = butterfly_problem();
        p.importance = std::map<ImportanceKey, double>{{{"b1", 0, "R1"}, 10.0},
                                                       {{"b1", 0, "R2"}, 10.0}};
        const ContingencyResult res = solve_weighted_delivery(p);
        REQUIRE(res.status == lp::SolveStatus::Optimal);
        CHECK(res.objective == Catch::Approx(31.0).margin(1e-6));
        CHECK(res.delivered.at({"b1", 0, "R1"}) == Catch::Approx(2.0).margin(1e-7));
        CHECK(res.delivered.at({"b1", 0, "R2"}) == Catch::Approx(2.0).margin(1e-7));
        const auto rep = oracle::recheck_appendix_constraints(p, res.topology, res.flows,
                                                              1e-8, res.delivered);
        CHECK(rep.pass);
    }
    SECTION("requires an importance map") {
        CHECK_THROWS_AS(solve_weighted_delivery(butterfly_problem()), InputError);
    }
}

TEST_CASE("extract_report on an empty topology") {
    const Problem p = single_edge_problem();
    Topology topo;
    topo.weights[{"S", "T"}] = 0.0;
    const auto report = extract_report(p, topo, FlowSet{});
    CHECK(report.support.empty());
}

TEST_CASE("node limits bound standing weights") {
    Problem p = single_edge_problem();
    SECTION("tight limit keeps the problem feasible") {
        p.node_limits["S"] = NodeLimit{std::nullopt, 1.0};
        const ContingencyResult res = solve_contingency(p);
        REQUIRE(res.status == lp::SolveStatus::Optimal);
        CHECK(res.objective == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("limit below the required weight is infeasible") {
        p.node_limits["S"] = NodeLimit{std::nullopt, 0.5};
        const ContingencyResult res = solve_contingency(p);
        CHECK(res.status == lp::SolveStatus::Infeasible);
    }
    SECTION("in-limit at the receiver behaves the same") {
        p.node_limits["T"] = NodeLimit{0.5, std::nullopt};
        const ContingencyResult res = solve_contingency(p);
        CHECK(res.status == lp::SolveStatus::Infeasible);
    }
}

TEST_CASE("oracle recheck passes on every optimal random solve") {
    std::mt19937 rng(1234);
    int optimal = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Problem p = testgen::random_problem(rng);
        REQUIRE(validate_problem(p).empty());
        const ContingencyResult res = solve_contingency(p);
        if (res.status != lp::SolveStatus::Optimal) continue;
        ++optimal;
        const auto rep = oracle::recheck_appendix_constraints(p, res.topology, res.flows);
        if (!rep.pass) {
            UNSCOPED_INFO("witness: " << rep.witness.value_or("none"));
        }
        CHECK(rep.pass);
        CHECK(check_solution(res.built.model, res.lp).ok());
    }
    CHECK(optimal >= 25);
}

TEST_CASE("adding a relay never increases the optimum") {
    std::mt19937 rng(555);
    std::uniform_int_distribution<int> cost(1, 5);
    for (int trial = 0; trial < 12; ++trial) {
        const Problem base = testgen::random_problem(rng);
        const ContingencyResult r0 = solve_contingency(base);
        if (r0.status != lp::SolveStatus::Optimal) continue;

        // New relay with its full optional incident edge set, random costs.
        Problem extended = base;
        extended.graph.nodes.push_back({"zz_new", NodeKind::Relay});
        for (const auto& n : base.graph.nodes) {
            const auto c = [&] { return static_cast<double>(cost(rng)); };
            if (n.kind == NodeKind::Sender)
                extended.graph.edges.push_back({n.id, "zz_new", c()});
            else if (n.kind == NodeKind::Receiver)
                extended.graph.edges.push_back({"zz_new", n.id, c()});
            else {
                extended.graph.edges.push_back({n.id, "zz_new", c()});
                extended.graph.edges.push_back({"zz_new", n.id, c()});
            }
        }
        REQUIRE(validate_problem(extended).empty());
        const ContingencyResult r1 = solve_contingency(extended);
        REQUIRE(r1.status == lp::SolveStatus::Optimal);
        CHECK(r1.objective <= r0.objective + 1e-7 * (1.0 + r0.objective));
    }
}

TEST_CASE("relaxed mode never costs more than strict mode") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        Problem p = testgen::random_problem(rng);
        p.sender_replication = SenderReplication::Strict;
        const ContingencyResult rs = solve_contingency(p);
        if (rs.status != lp::SolveStatus::Optimal) continue;
        p.sender_replication = SenderReplication::Relaxed;
        const ContingencyResult rr = solve_contingency(p);
        REQUIRE(rr.status == lp::SolveStatus::Optimal);
        CHECK(rr.objective <= rs.objective + 1e-7 * (1.0 + rs.objective));
    }
}

TEST_CASE("splitting a broadcast never costs more than merging it") {
    std::mt19937 rng(888);
    for (int trial = 0; trial < 12; ++trial) {
        Problem p = testgen::random_problem(rng);
        if (p.broadcasts.size() < 2) continue;

        Problem merged = p;
        Broadcast all;
        all.id = "merged";
        for (const auto& b : p.broadcasts)
            for (const auto& m : b.messages) all.messages.push_back(m);
        merged.broadcasts = {all};

        const ContingencyResult rm = solve_contingency(merged);
        if (rm.status != lp::SolveStatus::Optimal) continue;
        const ContingencyResult rp = solve_contingency(p);
        REQUIRE(rp.status == lp::SolveStatus::Optimal);
        CHECK(rp.objective <= rm.objective + 1e-7 * (1.0 + rm.objective));
    }
}

TEST_CASE("scaling every cost scales the optimum and keeps a support") {
    std::mt19937 rng(999);
    const double lambda = 2.5;
    for (int trial = 0; trial < 12; ++trial) {
        const Problem p = testgen::random_problem(rng);
        const ContingencyResult r0 = solve_contingency(p);
        if (r0.status != lp::SolveStatus::Optimal) continue;
        Problem scaled = p;
        for (auto& e : scaled.graph.edges) e.cost *= lambda;
        const ContingencyResult r1 = solve_contingency(scaled);
        REQUIRE(r1.status == lp::SolveStatus::Optimal);
        CHECK(r1.objective ==
              Catch::Approx(lambda * r0.objective).margin(1e-6 * (1 + r0.objective)));
        // The unscaled optimal weights stay optimal for the scaled costs.
        double replay = 0.0;
        for (const auto& e : scaled.graph.edges)
            replay += e.cost * r0.topology.weights.at(e.key());
        CHECK(replay >= r1.objective - 1e-6 * (1 + r1.objective));
        CHECK(replay <= lambda * r0.objective + 1e-6 * (1 + r1.objective));
    }
}
