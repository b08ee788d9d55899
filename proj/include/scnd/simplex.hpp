#pragma once

#include <memory>
#include <span>
#include <vector>

#include "scnd/lp.hpp"

namespace scnd {

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
    std::vector<double> x;
    double objective = 0.0;
    LpStatus status = LpStatus::Infeasible;
    long iterations = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    /// Phase-1 infeasibility sum above which the problem is declared infeasible.
    double infeasibility_tol = 1e-7;
    int refactor_interval = 100;
    /// Consecutive non-improving pivots before switching to Bland's rule.
    int stall_limit = 50;
    long max_iterations = 1'000'000;
};

/// Bounded-variable revised simplex.
///
/// Every row gets a logical column (a.x - s = 0, with the row relation moved
/// into the bounds of s) and an artificial column. Each solve starts from the
/// all-artificial basis, which is primal feasible for the phase-1 problem, and
/// runs phase 1 (minimise the artificial sum) followed by phase 2.
///
/// The basis is held as a sparse LU factorisation refreshed every
/// `refactor_interval` pivots, with product-form eta updates in between.
/// Dantzig pricing is used until `stall_limit` consecutive degenerate pivots,
/// then Bland's rule until the objective moves again.
class SimplexSolver {
public:
    explicit SimplexSolver(const LinearProgram& lp, LpOptions options = {});
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;

    /// Solves with the structural bounds replaced by `lower`/`upper`.
    LpSolution solve(std::span<const double> lower, std::span<const double> upper);
    LpSolution solve();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace scnd
