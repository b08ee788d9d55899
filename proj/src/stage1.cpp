#include "scnd/stage1.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <ostream>

#include "scnd/error.hpp"
#include "scnd/format.hpp"

namespace scnd {

const char* to_string(ConstraintFamily f) {
    switch (f) {
        case ConstraintFamily::ProductionUpper: return "production_upper";
        case ConstraintFamily::ProductionLower: return "production_lower";
        case ConstraintFamily::PlantBalance: return "plant_balance";
        case ConstraintFamily::WarehouseBalance: return "warehouse_balance";
        case ConstraintFamily::DemandCover: return "demand_cover";
        case ConstraintFamily::PlantLinkOpen: return "plant_link_open";
        case ConstraintFamily::CustomerLinkOpen: return "customer_link_open";
        case ConstraintFamily::PlantArcCapacity: return "plant_arc_capacity";
        case ConstraintFamily::CustomerArcCapacity: return "customer_arc_capacity";
        case ConstraintFamily::WarehouseSizing: return "warehouse_sizing";
        case ConstraintFamily::WarehouseCapacity: return "warehouse_capacity";
    }
    return "?";
}

namespace {

std::string row_name(ConstraintFamily f, std::size_t a) {
    return std::string(to_string(f)) + "(" + std::to_string(a) + ")";
}

std::string row_name(ConstraintFamily f, std::size_t a, std::size_t b) {
    return std::string(to_string(f)) + "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

}  // namespace

std::size_t stage1_row_count(std::size_t I, std::size_t J, std::size_t K) {
    return I + J + K + 2 * I * J + 2 * J * K + 2 * J;
}

MilpProblem build_stage1(const InstanceSpec& s, const BuildOptions& options) {
    const auto I = s.n_plants, J = s.n_warehouses, K = s.n_customers;
    MilpProblem prob;
    prob.var_index = VarIndex(I, J, K);
    const VarIndex& v = prob.var_index;
    LinearProgram& lp = prob.lp;
    const auto& c = s.costs;

    for (std::size_t i = 0; i < I; ++i) lp.add_var(c.c_prod[i], s.p_lower[i], s.p_upper[i]);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) lp.add_var(c.c_var_ij(i, j), 0.0, s.q_upper_ij(i, j));
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k) lp.add_var(c.c_var_jk(j, k), 0.0, s.q_upper_jk(j, k));
    for (std::size_t j = 0; j < J; ++j) lp.add_var(0.0, 0.0, s.w_upper[j]);
    for (std::size_t j = 0; j < J; ++j) lp.add_var(c.c_install[j], 0.0, 1.0);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) lp.add_var(c.c_fix_ij(i, j), 0.0, 1.0);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k) lp.add_var(c.c_fix_jk(j, k), 0.0, 1.0);

    prob.integrality.assign(lp.n_vars, 0);
    for (int col = v.y(0); col < lp.n_vars; ++col) prob.integrality[col] = 1;

    using F = ConstraintFamily;
    for (std::size_t i = 0; i < I; ++i) {
        std::vector<Term> t{{v.p(i), 1.0}};
        for (std::size_t j = 0; j < J; ++j) t.push_back({v.qij(i, j), -1.0});
        lp.add_row(std::move(t), Relation::Equal, 0.0, row_name(F::PlantBalance, i));
    }
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<Term> t;
        for (std::size_t i = 0; i < I; ++i) t.push_back({v.qij(i, j), 1.0});
        for (std::size_t k = 0; k < K; ++k) t.push_back({v.qjk(j, k), -1.0});
        lp.add_row(std::move(t), Relation::Equal, -s.inventory[j], row_name(F::WarehouseBalance, j));
    }
    const auto target = demand_targets(s, options.safety_factor);
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<Term> t;
        for (std::size_t j = 0; j < J; ++j) t.push_back({v.qjk(j, k), 1.0});
        lp.add_row(std::move(t), Relation::GreaterEqual, target[k], row_name(F::DemandCover, k));
    }
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
            lp.add_row({{v.xij(i, j), 1.0}, {v.y(j), -1.0}}, Relation::LessEqual, 0.0,
                       row_name(F::PlantLinkOpen, i, j));
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k)
            lp.add_row({{v.xjk(j, k), 1.0}, {v.y(j), -1.0}}, Relation::LessEqual, 0.0,
                       row_name(F::CustomerLinkOpen, j, k));
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
            lp.add_row({{v.qij(i, j), 1.0}, {v.xij(i, j), -s.q_upper_ij(i, j)}}, Relation::LessEqual, 0.0,
                       row_name(F::PlantArcCapacity, i, j));
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k)
            lp.add_row({{v.qjk(j, k), 1.0}, {v.xjk(j, k), -s.q_upper_jk(j, k)}}, Relation::LessEqual, 0.0,
                       row_name(F::CustomerArcCapacity, j, k));
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<Term> t{{v.w(j), 1.0}};
        for (std::size_t i = 0; i < I; ++i) t.push_back({v.qij(i, j), -s.a[j]});
        lp.add_row(std::move(t), Relation::GreaterEqual, s.a[j] * s.inventory[j],
                   row_name(F::WarehouseSizing, j));
    }
    for (std::size_t j = 0; j < J; ++j)
        lp.add_row({{v.w(j), 1.0}, {v.y(j), -s.w_upper[j]}}, Relation::LessEqual, 0.0,
                   row_name(F::WarehouseCapacity, j));

    // Zero coefficients (e.g. a_j = 0) are dropped; rows left without terms go too.
    for (auto& row : lp.rows)
        std::erase_if(row.terms, [](const Term& t) { return t.coef == 0.0; });
    std::erase_if(lp.rows, [](const Row& r) {
        if (!r.terms.empty()) return false;
        switch (r.relation) {
            case Relation::LessEqual: return r.rhs >= 0.0;
            case Relation::GreaterEqual: return r.rhs <= 0.0;
            case Relation::Equal: return r.rhs == 0.0;
        }
        return false;
    });
    return prob;
}

double stage1_cost(const InstanceSpec& s, const Stage1Solution& sol) {
    const auto I = s.n_plants, J = s.n_warehouses, K = s.n_customers;
    const auto& c = s.costs;
    double tc = 0.0;
    for (std::size_t i = 0; i < I; ++i) tc += c.c_prod[i] * sol.p[i];
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) tc += c.c_var_ij(i, j) * sol.q_ij(i, j);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k) tc += c.c_var_jk(j, k) * sol.q_jk(j, k);
    for (std::size_t j = 0; j < J; ++j) tc += 0.0 * sol.w[j];
    for (std::size_t j = 0; j < J; ++j) tc += c.c_install[j] * sol.y[j];
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) tc += c.c_fix_ij(i, j) * sol.x_ij[i * J + j];
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k) tc += c.c_fix_jk(j, k) * sol.x_jk[j * K + k];
    return tc;
}

Stage1Solution extract_stage1(const InstanceSpec& s, const MilpProblem& problem,
                              const std::vector<double>& x, MilpStatus status, double gap) {
    const VarIndex& v = problem.var_index;
    if (x.size() != static_cast<std::size_t>(problem.n_vars()))
        throw InvalidInstance("solution vector length does not match the problem");
    const auto I = v.n_plants(), J = v.n_warehouses(), K = v.n_customers();

    auto binary = [&](int col) -> std::uint8_t {
        const double r = std::round(x[col]);
        if (std::abs(x[col] - r) > 1e-6 || (r != 0.0 && r != 1.0))
            throw NonIntegralBinary(to_string(v.ref(col)), x[col]);
        return static_cast<std::uint8_t>(r);
    };

    Stage1Solution sol;
    sol.p.resize(I);
    sol.q_ij = Grid(I, J);
    sol.q_jk = Grid(J, K);
    sol.w.resize(J);
    sol.y.resize(J);
    sol.x_ij.resize(I * J);
    sol.x_jk.resize(J * K);
    // Adding +0.0 turns any -0.0 from the solver into +0.0.
    for (std::size_t i = 0; i < I; ++i) sol.p[i] = x[v.p(i)] + 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        sol.w[j] = x[v.w(j)] + 0.0;
        sol.y[j] = binary(v.y(j));
        for (std::size_t i = 0; i < I; ++i) {
            sol.q_ij(i, j) = x[v.qij(i, j)] + 0.0;
            sol.x_ij[i * J + j] = binary(v.xij(i, j));
        }
        for (std::size_t k = 0; k < K; ++k) {
            sol.q_jk(j, k) = x[v.qjk(j, k)] + 0.0;
            sol.x_jk[j * K + k] = binary(v.xjk(j, k));
        }
    }
    sol.status = status;
    sol.gap = gap;
    sol.tc = stage1_cost(s, sol);
    return sol;
}

std::vector<double> to_columns(const MilpProblem& problem, const Stage1Solution& sol) {
    const VarIndex& v = problem.var_index;
    const auto I = v.n_plants(), J = v.n_warehouses(), K = v.n_customers();
    std::vector<double> x(problem.n_vars(), 0.0);
    for (std::size_t i = 0; i < I; ++i) x[v.p(i)] = sol.p[i];
    for (std::size_t j = 0; j < J; ++j) {
        x[v.w(j)] = sol.w[j];
        x[v.y(j)] = sol.y[j];
        for (std::size_t i = 0; i < I; ++i) {
            x[v.qij(i, j)] = sol.q_ij(i, j);
            x[v.xij(i, j)] = sol.x_ij[i * J + j];
        }
        for (std::size_t k = 0; k < K; ++k) {
            x[v.qjk(j, k)] = sol.q_jk(j, k);
            x[v.xjk(j, k)] = sol.x_jk[j * K + k];
        }
    }
    return x;
}

Stage1Run solve_stage1(const InstanceSpec& spec, const SolverConfig& cfg, const BuildOptions& options) {
    const MilpProblem problem = build_stage1(spec, options);
    Stage1Run run;
    run.milp = solve_milp(problem, cfg);
    if (!run.milp.has_incumbent()) return run;
    run.solution = extract_stage1(spec, problem, run.milp.x, run.milp.status, run.milp.gap);
    const double tc = run.solution->tc;
    const double obj = run.milp.objective;
    if (std::abs(tc - obj) > 1e-6 * std::max(1.0, std::abs(obj)))
        throw NumericalBreakdown("recomputed network cost " + format_double(tc) +
                                 " disagrees with solver objective " + format_double(obj));
    spdlog::info("stage 1: {} cost {:.10g} gap {:.3g} nodes {}", to_string(run.milp.status), tc,
                 run.milp.gap, run.milp.nodes_explored);
    return run;
}

namespace {

std::string column_name(const MilpProblem& p, int col) {
    if (p.var_index.n_vars() == p.n_vars()) return to_string(p.var_index.ref(col));
    return "x" + std::to_string(col);
}

void write_terms(std::ostream& os, const MilpProblem& p, const std::vector<Term>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        if (t.coef == 0.0) continue;
        os << (t.coef < 0.0 ? " - " : (first ? " " : " + ")) << format_double(std::abs(t.coef)) << ' '
           << column_name(p, t.col);
        first = false;
    }
    if (first) os << " 0 " << column_name(p, 0);
}

}  // namespace

void write_lp_format(std::ostream& os, const MilpProblem& p) {
    os << "\\ network design MILP: " << p.n_vars() << " columns, " << p.lp.rows.size() << " rows\n";
    os << "Minimize\n obj:";
    std::vector<Term> obj;
    for (int j = 0; j < p.n_vars(); ++j) obj.push_back({j, p.lp.objective[j]});
    write_terms(os, p, obj);
    os << "\nSubject To\n";
    for (std::size_t r = 0; r < p.lp.rows.size(); ++r) {
        const Row& row = p.lp.rows[r];
        os << ' ' << (row.name.empty() ? "r" + std::to_string(r) : row.name) << ':';
        write_terms(os, p, row.terms);
        switch (row.relation) {
            case Relation::LessEqual: os << " <= "; break;
            case Relation::GreaterEqual: os << " >= "; break;
            case Relation::Equal: os << " = "; break;
        }
        os << format_double(row.rhs) << '\n';
    }
    os << "Bounds\n";
    for (int j = 0; j < p.n_vars(); ++j) {
        if (p.integrality[j]) continue;
        const double lo = p.lp.lower[j], hi = p.lp.upper[j];
        os << ' ' << (std::isfinite(lo) ? format_double(lo) : "-inf") << " <= " << column_name(p, j)
           << " <= " << (std::isfinite(hi) ? format_double(hi) : "+inf") << '\n';
    }
    os << "Binaries\n";
    for (int j = 0; j < p.n_vars(); ++j)
        if (p.integrality[j]) os << ' ' << column_name(p, j) << '\n';
    os << "End\n";
}

}  // namespace scnd
