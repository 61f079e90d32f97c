#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "generators.hpp"
#include "orgnet/oracle.hpp"
#include "orgnet/simplex.hpp"

using namespace orgnet::lp;
using orgnet::oracle::lp_vertex_enum;

TEST_CASE("single binding constraint") {
    LpModel m;
    const int x = m.add_var(1.0);
    const int r = m.add_row(Relation::GreaterEq, 3.0);
    m.add_term(r, x, 1.0);
    const LpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == Catch::Approx(3.0).margin(1e-9));
    CHECK(s.primal[0] == Catch::Approx(3.0).margin(1e-9));

    const CheckReport rep = check_solution(m, s);
    CHECK(rep.ok());
    CHECK(rep.duality_gap == 0.0);  // exact on this instance
    CHECK(rep.max_row_residual <= 1e-8);
}

TEST_CASE("nonnegative sum cannot be negative: infeasible with Farkas certificate") {
    LpModel m;
    const int x = m.add_var(1.0);
    const int y = m.add_var(1.0);
    const int r = m.add_row(Relation::Equal, -1.0);
    m.add_term(r, x, 1.0);
    m.add_term(r, y, 1.0);
    const LpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Infeasible);
    REQUIRE(s.certificate.size() == 1);
    CHECK(farkas_margin(m, s.certificate, 1e-9) > 1e-9);
}

TEST_CASE("unbounded below returns an improving feasible ray") {
    LpModel m;
    m.add_var(-1.0);
    const LpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Unbounded);
    CHECK(check_ray(m, s.certificate, 1e-9));
}

TEST_CASE("random instances match vertex enumeration") {
    std::mt19937 rng(2024);
    int optimal_seen = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const LpModel m = testgen::random_lp(rng, 5, 6);
        const LpSolution s = solve(m);
        const auto ev = lp_vertex_enum(m);
        if (s.status == SolveStatus::Optimal) {
            ++optimal_seen;
            REQUIRE(ev.feasible);
            CHECK(std::fabs(ev.objective - s.objective) <=
                  1e-7 * (1.0 + std::fabs(ev.objective)));
            CHECK(check_solution(m, s).ok());
        } else if (s.status == SolveStatus::Infeasible) {
            CHECK_FALSE(ev.feasible);
            CHECK(farkas_margin(m, s.certificate, 1e-7) > 0.0);
        } else {
            CHECK(check_ray(m, s.certificate, 1e-7));
        }
    }
    CHECK(optimal_seen > 20);
}

TEST_CASE("check_solution flags a perturbed primal") {
    LpModel m;
    const int x = m.add_var(2.0);
    const int y = m.add_var(3.0);
    int r1 = m.add_row(Relation::GreaterEq, 4.0);
    m.add_term(r1, x, 1.0);
    m.add_term(r1, y, 2.0);
    int r2 = m.add_row(Relation::LessEq, 10.0);
    m.add_term(r2, x, 1.0);
    m.add_term(r2, y, 1.0);
    LpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    REQUIRE(check_solution(m, s).ok());

    LpSolution bad = s;
    bad.primal[1] += 1.0;  // breaks the equality structure of optimality
    bad.primal[0] = -0.5;  // and a bound
    const CheckReport rep = check_solution(m, bad);
    CHECK_FALSE(rep.ok());
    CHECK(rep.max_bound_violation >= 0.5);
}

TEST_CASE("weak duality holds at every phase-2 iterate (debug hook)") {
    std::mt19937 rng(99);
    int calls = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const LpModel m = testgen::random_lp(rng);
        SolveOptions opts;
        opts.on_iterate = [&](const IterateInfo& it) {
            ++calls;
            // The Lagrangian bound never exceeds the feasible objective.
            CHECK(it.dual_bound <= it.primal_objective + 1e-6);
        };
        try {
            (void)solve(m, opts);
        } catch (const orgnet::ResourceError&) {
        }
    }
    CHECK(calls > 0);
}

TEST_CASE("degenerate regression suite terminates with Bland's rule") {
    SolveOptions bland;
    bland.pricing = Pricing::Bland;

    SECTION("beale's cycling example") {
        LpModel m;
        const int x1 = m.add_var(-0.75), x2 = m.add_var(150.0);
        const int x3 = m.add_var(-0.02), x4 = m.add_var(6.0);
        int c1 = m.add_row(Relation::LessEq, 0.0);
        m.add_term(c1, x1, 0.25);
        m.add_term(c1, x2, -60.0);
        m.add_term(c1, x3, -1.0 / 25.0);
        m.add_term(c1, x4, 9.0);
        int c2 = m.add_row(Relation::LessEq, 0.0);
        m.add_term(c2, x1, 0.5);
        m.add_term(c2, x2, -90.0);
        m.add_term(c2, x3, -1.0 / 50.0);
        m.add_term(c2, x4, 3.0);
        int c3 = m.add_row(Relation::LessEq, 1.0);
        m.add_term(c3, x3, 1.0);
        const LpSolution s = solve(m, bland);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.objective == Catch::Approx(-0.05).margin(1e-9));
    }

    SECTION("highly degenerate random equality systems") {
        std::mt19937 rng(7);
        std::uniform_int_distribution<int> coef(-2, 2);
        for (int trial = 0; trial < 30; ++trial) {
            LpModel m;
            for (int j = 0; j < 5; ++j) m.add_var(coef(rng));
            for (int i = 0; i < 4; ++i) {
                int r = m.add_row(Relation::Equal, 0.0);  // all-zero rhs: degenerate
                for (int j = 0; j < 5; ++j) m.add_term(r, j, coef(rng));
            }
            int r = m.add_row(Relation::LessEq, 2.0);
            for (int j = 0; j < 5; ++j) m.add_term(r, j, 1.0);
            const LpSolution s = solve(m, bland);  // must terminate
            if (s.status == SolveStatus::Optimal) CHECK(check_solution(m, s).ok());
        }
    }
}

TEST_CASE("objective scaling leaves the argmin support unchanged") {
    std::mt19937 rng(512);
    for (int trial = 0; trial < 40; ++trial) {
        LpModel m = testgen::random_lp(rng);
        const LpSolution s1 = solve(m);
        if (s1.status != SolveStatus::Optimal) continue;
        LpModel scaled = m;
        const double lambda = 3.5;
        for (auto& c : scaled.objective) c *= lambda;
        const LpSolution s2 = solve(scaled);
        REQUIRE(s2.status == SolveStatus::Optimal);
        CHECK(std::fabs(s2.objective - lambda * s1.objective) <=
              1e-7 * (1.0 + std::fabs(lambda * s1.objective)));
        for (int j = 0; j < m.n_vars; ++j) {
            const bool in1 = s1.primal[j] > 1e-7;
            const bool in2 = s2.primal[j] > 1e-7;
            CHECK(in1 == in2);
        }
    }
}

TEST_CASE("input validation and resource limits") {
    SECTION("non-finite coefficient") {
        LpModel m;
        m.add_var(std::numeric_limits<double>::quiet_NaN());
        CHECK_THROWS_AS(solve(m), orgnet::InputError);
    }
    SECTION("crossed bounds") {
        LpModel m;
        m.add_var(1.0, 2.0, 1.0);
        CHECK_THROWS_AS(solve(m), orgnet::InputError);
    }
    SECTION("iteration cap raises a resource error") {
        std::mt19937 rng(3);
        LpModel m = testgen::random_lp(rng, 5, 6);
        SolveOptions opts;
        opts.iter_cap = 0;
        CHECK_THROWS_AS(solve(m, opts), orgnet::ResourceError);
    }
}

TEST_CASE("LP text export is well formed") {
    LpModel m;
    const int x = m.add_var(1.5, 0.0, 4.0);
    const int y = m.add_var(-2.0, -kInf, kInf);
    int r = m.add_row(Relation::LessEq, 7.0);
    m.add_term(r, x, 1.0);
    m.add_term(r, y, 3.0);
    const std::string text = to_lp_format(m);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("<= 7") != std::string::npos);
    CHECK(text.find("x1 free") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
}
