#include <doctest.h>

#include <chrono>
#include <cmath>

#include "../oracle/dense_lp.hpp"
#include "scnd/error.hpp"
#include "scnd/stage1.hpp"

using namespace scnd;

namespace {

MilpProblem knapsack_like() {
    // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5 (as a minimization), binaries.
    MilpProblem p;
    p.var_index = VarIndex(1, 1, 1);
    for (double c : {-5.0, -4.0, -3.0}) p.lp.add_var(c, 0.0, 1.0);
    p.lp.add_row({{0, 2.0}, {1, 3.0}, {2, 1.0}}, Relation::LessEqual, 5.0);
    p.integrality.assign(3, 1);
    return p;
}

}  // namespace

TEST_CASE("integral root needs a single node") {
    MilpProblem p;
    p.var_index = VarIndex(1, 1, 1);
    p.lp.add_var(1.0, 0.0, 1.0);
    p.lp.add_var(1.0, 0.0, 1.0);
    p.lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::GreaterEqual, 1.0);
    p.integrality.assign(2, 1);
    const auto sol = solve_milp(p);
    CHECK(sol.status == MilpStatus::Optimal);
    CHECK(sol.nodes_explored == 1);
    CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("small binary program matches enumeration") {
    const auto p = knapsack_like();
    SolverConfig cfg;
    cfg.gap_tolerance = 1e-9;
    const auto sol = solve_milp(p, cfg);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-9.0));
    CHECK(sol.objective == doctest::Approx(oracle::enumerate_milp(p).objective));
}

TEST_CASE("zero time limit reports TimeLimit without an incumbent") {
    const auto spec = generate_instance(3, 3, 3, 3);
    SolverConfig cfg;
    cfg.time_limit_seconds = 0.0;
    const auto sol = solve_milp(build_stage1(spec), cfg);
    CHECK(sol.status == MilpStatus::TimeLimit);
    CHECK_FALSE(sol.has_incumbent());
    CHECK(sol.nodes_explored == 0);
}

TEST_CASE("node limit with an incumbent reports FeasibleWithGap") {
    const auto spec = generate_instance(42, 5, 5, 5);
    SolverConfig cfg;
    cfg.gap_tolerance = 1e-9;
    cfg.node_limit = 3;
    const auto sol = solve_milp(build_stage1(spec), cfg);
    REQUIRE(sol.has_incumbent());
    CHECK(sol.status == MilpStatus::FeasibleWithGap);
    CHECK(sol.gap > cfg.gap_tolerance);
}

TEST_CASE("infeasible binary program is Infeasible") {
    MilpProblem p;
    p.var_index = VarIndex(1, 1, 1);
    p.lp.add_var(1.0, 0.0, 1.0);
    p.lp.add_var(1.0, 0.0, 1.0);
    p.lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::Equal, 1.5);
    p.lp.add_row({{0, 1.0}, {1, -1.0}}, Relation::Equal, 0.0);
    p.integrality.assign(2, 1);
    CHECK(solve_milp(p).status == MilpStatus::Infeasible);
}

TEST_CASE("invalid configuration is rejected") {
    SolverConfig cfg;
    cfg.gap_tolerance = 0.0;
    CHECK_THROWS_AS(solve_milp(knapsack_like(), cfg), ConfigError);
    auto p = knapsack_like();
    p.lp.upper[0] = 2.0;
    CHECK_THROWS_AS(solve_milp(p), InvalidInstance);
}

TEST_CASE("bounds are monotone along the node sequence") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto spec = generate_instance(seed, 4, 4, 4);
        SolverConfig cfg;
        cfg.record_trace = true;
        cfg.gap_tolerance = 1e-4;
        cfg.node_limit = 400;
        const auto sol = solve_milp(build_stage1(spec), cfg);
        REQUIRE(sol.trace.size() >= 2);
        for (std::size_t t = 1; t < sol.trace.size(); ++t) {
            CHECK(sol.trace[t].lower_bound >= sol.trace[t - 1].lower_bound);
            CHECK(sol.trace[t].incumbent <= sol.trace[t - 1].incumbent);
        }
        CHECK(sol.bound <= sol.objective);
    }
}

TEST_CASE("solves are deterministic") {
    const auto problem = build_stage1(generate_instance(11, 4, 3, 4));
    SolverConfig cfg;
    cfg.gap_tolerance = 1e-4;
    const auto a = solve_milp(problem, cfg);
    const auto b = solve_milp(problem, cfg);
    CHECK(a.x == b.x);
    CHECK(a.nodes_explored == b.nodes_explored);
    CHECK(a.lp_iterations == b.lp_iterations);
}

TEST_CASE("2x2x2 instances agree with exhaustive enumeration") {
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CAPTURE(seed);
        const auto problem = build_stage1(generate_instance(seed, 2, 2, 2));
        SolverConfig cfg;
        cfg.gap_tolerance = 1e-9;
        const auto got = solve_milp(problem, cfg);
        const auto want = oracle::enumerate_milp(problem);
        REQUIRE(want.feasible);
        REQUIRE(got.status == MilpStatus::Optimal);
        CHECK(std::abs(got.objective - want.objective) <= 1e-6 * std::abs(want.objective));
        CHECK(max_violation(problem.lp, got.x) <= 1e-6);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 10.0);
}
