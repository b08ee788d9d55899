#include <doctest.h>

#include <cmath>

#include "../oracle/dense_lp.hpp"
#include "scnd/error.hpp"
#include "scnd/rng.hpp"
#include "scnd/simplex.hpp"

using namespace scnd;

TEST_CASE("single variable lower row") {
    LinearProgram lp;
    lp.add_var(1.0, 0.0, 10.0);
    lp.add_row({{0, 1.0}}, Relation::GreaterEqual, 3.0);
    const auto sol = solve_lp(lp);
    CHECK(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("two variables on the unit simplex face") {
    LinearProgram lp;
    lp.add_var(-1.0, 0.0, 1.0);
    lp.add_var(-1.0, 0.0, 1.0);
    lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 1.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    // Vertex enumeration of {x+y<=1, 0<=x,y<=1}: (0,0)->0, (1,0)->-1, (0,1)->-1.
    CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("contradictory rows are infeasible") {
    LinearProgram lp;
    lp.add_var(1.0, -kInf, kInf);
    lp.add_row({{0, 1.0}}, Relation::GreaterEqual, 2.0);
    lp.add_row({{0, 1.0}}, Relation::LessEqual, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("crossed bounds are infeasible") {
    LinearProgram lp;
    lp.add_var(1.0, 2.0, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("free variable driven to minus infinity is unbounded") {
    LinearProgram lp;
    lp.add_var(1.0, -kInf, kInf);
    lp.add_var(0.0, 0.0, 1.0);
    lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 5.0);
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("no rows: variables sit on the cheap bound") {
    LinearProgram lp;
    lp.add_var(2.0, 1.0, 4.0);
    lp.add_var(-1.0, 0.0, 3.0);
    const auto sol = solve_lp(lp);
    CHECK(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-1.0));
}

TEST_CASE("equality system with degenerate vertex") {
    // min -x - y s.t. x + y = 2, x - y = 0, x <= 1, y <= 1 (single point (1,1)).
    LinearProgram lp;
    lp.add_var(-1.0, 0.0, 1.0);
    lp.add_var(-1.0, 0.0, 1.0);
    lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::Equal, 2.0);
    lp.add_row({{0, 1.0}, {1, -1.0}}, Relation::Equal, 0.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(1.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
}

namespace {

LinearProgram random_lp(std::uint64_t seed, int n, int m) {
    Stream rng(derive_key(seed, 17));
    LinearProgram lp;
    std::vector<double> x0(n);
    for (int j = 0; j < n; ++j) {
        const double lo = rng.uniform(-5.0, 0.0);
        const double hi = lo + rng.uniform(0.5, 10.0);
        lp.add_var(rng.uniform(-3.0, 3.0), lo, hi);
        x0[j] = rng.uniform(lo, hi);
    }
    // Rows built around an interior point so the LP is feasible.
    for (int r = 0; r < m; ++r) {
        std::vector<Term> terms;
        double at = 0.0;
        for (int j = 0; j < n; ++j) {
            if (rng.uniform() < 0.5) continue;
            const double c = rng.uniform(-4.0, 4.0);
            terms.push_back({j, c});
            at += c * x0[j];
        }
        const double u = rng.uniform();
        if (u < 0.2) lp.add_row(std::move(terms), Relation::Equal, at);
        else if (u < 0.6) lp.add_row(std::move(terms), Relation::LessEqual, at + rng.uniform(0.0, 3.0));
        else lp.add_row(std::move(terms), Relation::GreaterEqual, at - rng.uniform(0.0, 3.0));
    }
    return lp;
}

}  // namespace

TEST_CASE("random bounded LPs agree with the dense tableau oracle") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CAPTURE(seed);
        const auto lp = random_lp(seed, 6 + static_cast<int>(seed % 7), 3 + static_cast<int>(seed % 5));
        const auto got = solve_lp(lp);
        const auto want = oracle::solve_dense(lp);
        REQUIRE(want.feasible);
        REQUIRE(got.status == LpStatus::Optimal);
        CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-9));
        CHECK(max_violation(lp, got.x) <= 1e-7);
    }
}

TEST_CASE("repeated solves from the same solver are identical") {
    const auto lp = random_lp(5, 12, 8);
    SimplexSolver solver(lp);
    const auto a = solver.solve();
    const auto b = solver.solve();
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
}
