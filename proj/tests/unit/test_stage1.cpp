#include <doctest.h>

#include <cmath>
#include <sstream>

#include "scnd/error.hpp"
#include "scnd/stage1.hpp"

using namespace scnd;

TEST_CASE("problem dimensions follow the set sizes") {
    const auto small = build_stage1(generate_instance(1, 2, 2, 2));
    CHECK(small.n_vars() == 22);
    CHECK(small.n_binaries() == 10);
    CHECK(small.lp.rows.size() == 26);
    CHECK(stage1_row_count(2, 2, 2) == 26);

    const auto big = build_stage1(generate_instance(42, 20, 20, 20));
    CHECK(big.n_vars() == 1660);
    CHECK(big.n_binaries() == 820);
    CHECK(big.lp.rows.size() == 1700);
}

TEST_CASE("variable index is a bijection") {
    const VarIndex idx(3, 2, 4);
    for (int c = 0; c < idx.n_vars(); ++c) {
        CHECK(idx.col(idx.ref(c)) == c);
        const auto parsed = parse_var_ref(to_string(idx.ref(c)));
        REQUIRE(parsed);
        CHECK(idx.col(*parsed) == c);
    }
}

TEST_CASE("zero warehouse capacity row") {
    auto spec = generate_instance(5, 2, 2, 2);
    for (auto& c : spec.costs.c_install) c = 0.0;
    spec.w_upper[1] = 0.0;
    const auto p = build_stage1(spec);
    const auto& row = p.lp.rows.back();
    CHECK(row.name == "warehouse_capacity(1)");
    CHECK(row.relation == Relation::LessEqual);
    CHECK(row.rhs == 0.0);
    const int w1 = p.var_index.w(1);
    CHECK(p.lp.upper[w1] == 0.0);
    for (double y1 : {0.0, 1.0}) {
        std::vector<double> x(p.n_vars(), 0.0);
        x[p.var_index.y(1)] = y1;
        x[w1] = 1.0;
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * x[t.col];
        CHECK(lhs > row.rhs);
    }
}

TEST_CASE("builds are deterministic") {
    const auto spec = generate_instance(9, 3, 3, 3);
    const auto a = build_stage1(spec);
    const auto b = build_stage1(spec);
    REQUIRE(a.lp.rows.size() == b.lp.rows.size());
    for (std::size_t r = 0; r < a.lp.rows.size(); ++r) {
        CHECK(a.lp.rows[r].rhs == b.lp.rows[r].rhs);
        REQUIRE(a.lp.rows[r].terms.size() == b.lp.rows[r].terms.size());
        for (std::size_t t = 0; t < a.lp.rows[r].terms.size(); ++t) {
            CHECK(a.lp.rows[r].terms[t].col == b.lp.rows[r].terms[t].col);
            CHECK(a.lp.rows[r].terms[t].coef == b.lp.rows[r].terms[t].coef);
        }
    }
    CHECK(a.lp.objective == b.lp.objective);
}

TEST_CASE("zero vector on a zero-demand instance costs nothing") {
    const auto spec = make_zero_instance(2, 2, 2);
    const auto p = build_stage1(spec);
    const auto sol = extract_stage1(spec, p, std::vector<double>(p.n_vars(), 0.0), MilpStatus::Optimal, 0.0);
    CHECK(sol.tc == 0.0);
}

TEST_CASE("fractional connection binary is rejected") {
    const auto spec = generate_instance(1, 2, 2, 2);
    const auto p = build_stage1(spec);
    std::vector<double> x(p.n_vars(), 0.0);
    x[p.var_index.xij(0, 0)] = 0.5;
    try {
        extract_stage1(spec, p, x, MilpStatus::Optimal, 0.0);
        FAIL("expected NonIntegralBinary");
    } catch (const NonIntegralBinary& e) {
        CHECK(e.variable() == "Xij(0,0)");
        CHECK(e.value() == 0.5);
    }
}

TEST_CASE("symbolic cost equals the objective dot product exactly") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto spec = generate_instance(seed, 3, 3, 3);
        SolverConfig cfg;
        const auto run = solve_stage1(spec, cfg);
        REQUIRE(run.solution);
        const auto p = build_stage1(spec);
        const auto cols = to_columns(p, *run.solution);
        CHECK(run.solution->tc == dot(p.lp.objective, cols));
        const auto back = extract_stage1(spec, p, cols, run.solution->status, run.solution->gap);
        CHECK(back == *run.solution);
    }
}

TEST_CASE("LP relaxation bounds the MILP from below") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto spec = generate_instance(seed, 3, 3, 4);
        const auto p = build_stage1(spec);
        const auto relaxed = solve_lp(p.lp);
        SolverConfig cfg;
        cfg.gap_tolerance = 1e-6;
        const auto milp = solve_milp(p, cfg);
        REQUIRE(relaxed.status == LpStatus::Optimal);
        REQUIRE(milp.has_incumbent());
        CHECK(relaxed.objective <= milp.objective + 1e-9 * std::abs(milp.objective));
    }
}

TEST_CASE("stage-1 solution respects linkage") {
    const auto spec = generate_instance(4, 3, 4, 5);
    const auto run = solve_stage1(spec, SolverConfig{});
    REQUIRE(run.solution);
    const auto& s = *run.solution;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (s.q_ij(i, j) > 1e-9) {
                CHECK(s.x_ij[i * 4 + j] == 1);
                CHECK(s.y[j] == 1);
            }
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 5; ++k)
            if (s.q_jk(j, k) > 1e-9) {
                CHECK(s.x_jk[j * 5 + k] == 1);
                CHECK(s.y[j] == 1);
            }
}

TEST_CASE("over-demanded instance is infeasible") {
    auto spec = generate_instance(2, 2, 2, 2);
    for (auto& d : spec.demand) d.mu = 1e6;
    const auto run = solve_stage1(spec, SolverConfig{});
    CHECK(run.milp.status == MilpStatus::Infeasible);
    CHECK_FALSE(run.solution);
}

TEST_CASE("LP export names every column and row") {
    const auto p = build_stage1(generate_instance(1, 2, 2, 2));
    std::ostringstream os;
    write_lp_format(os, p);
    const auto text = os.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("plant_balance(0):") != std::string::npos);
    CHECK(text.find("Binaries") != std::string::npos);
    CHECK(text.find("Xjk(1,1)") != std::string::npos);
    CHECK(text.rfind("End") != std::string::npos);
}
