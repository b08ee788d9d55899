#include "scnd/simplex.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "scnd/error.hpp"

namespace scnd {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
    }
    return "?";
}

namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

struct Eta {
    int pivot_row = 0;
    double pivot = 1.0;
    std::vector<int> idx;  // rows other than pivot_row with nonzero alpha
    std::vector<double> val;
};

}  // namespace

struct SimplexSolver::Impl {
    LpOptions opt;
    int m = 0;  // rows
    int n = 0;  // structural columns
    int total = 0;

    std::vector<int> col_start;
    std::vector<int> row_idx;
    std::vector<double> values;
    std::vector<double> cost_struct;
    std::vector<double> default_lower;
    std::vector<double> default_upper;
    std::vector<double> logical_lower;
    std::vector<double> logical_upper;
    double rhs_scale = 1.0;

    // Per-solve state.
    std::vector<double> lo, up, x, cost, art_sign;
    std::vector<VarState> state;
    std::vector<int> head;
    std::vector<Eta> etas;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    Eigen::VectorXd work;
    std::vector<double> alpha;
    long iterations = 0;

    Impl(const LinearProgram& lp, LpOptions o) : opt(o) {
        m = static_cast<int>(lp.rows.size());
        n = lp.n_vars;
        total = n + 2 * m;
        cost_struct = lp.objective;
        default_lower = lp.lower;
        default_upper = lp.upper;

        std::vector<int> count(n + 1, 0);
        for (const auto& row : lp.rows)
            for (const auto& t : row.terms)
                if (t.coef != 0.0) ++count[t.col + 1];
        col_start.assign(n + 1, 0);
        for (int j = 0; j < n; ++j) col_start[j + 1] = col_start[j] + count[j + 1];
        row_idx.resize(col_start[n]);
        values.resize(col_start[n]);
        std::vector<int> fill(col_start.begin(), col_start.end() - 1);
        for (int r = 0; r < m; ++r) {
            for (const auto& t : lp.rows[r].terms) {
                if (t.coef == 0.0) continue;
                row_idx[fill[t.col]] = r;
                values[fill[t.col]++] = t.coef;
            }
        }

        logical_lower.resize(m);
        logical_upper.resize(m);
        for (int r = 0; r < m; ++r) {
            const auto& row = lp.rows[r];
            rhs_scale = std::max(rhs_scale, std::abs(row.rhs));
            switch (row.relation) {
                case Relation::LessEqual: logical_lower[r] = -kInf; logical_upper[r] = row.rhs; break;
                case Relation::GreaterEqual: logical_lower[r] = row.rhs; logical_upper[r] = kInf; break;
                case Relation::Equal: logical_lower[r] = logical_upper[r] = row.rhs; break;
            }
        }
        work.resize(m);
        alpha.resize(m);
    }

    template <typename F>
    void for_column(int j, F&& f) const {
        if (j < n) {
            for (int p = col_start[j]; p < col_start[j + 1]; ++p) f(row_idx[p], values[p]);
        } else if (j < n + m) {
            f(j - n, -1.0);
        } else {
            f(j - n - m, art_sign[j - n - m]);
        }
    }

    double column_dot(int j, const Eigen::VectorXd& y) const {
        if (j < n) {
            double s = 0.0;
            for (int p = col_start[j]; p < col_start[j + 1]; ++p) s += values[p] * y[row_idx[p]];
            return s;
        }
        if (j < n + m) return -y[j - n];
        return art_sign[j - n - m] * y[j - n - m];
    }

    void refactor() {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(m) * 3);
        for (int i = 0; i < m; ++i)
            for_column(head[i], [&](int r, double v) { trip.emplace_back(r, i, v); });
        Eigen::SparseMatrix<double> basis(m, m);
        basis.setFromTriplets(trip.begin(), trip.end());
        basis.makeCompressed();
        lu.compute(basis);
        if (lu.info() != Eigen::Success)
            throw NumericalBreakdown("basis factorisation failed: " + lu.lastErrorMessage());
        etas.clear();
    }

    // B z = a, in place on `work`.
    void ftran() {
        work = lu.solve(work).eval();
        for (const auto& e : etas) {
            const double zp = work[e.pivot_row] / e.pivot;
            work[e.pivot_row] = zp;
            if (zp == 0.0) continue;
            for (std::size_t t = 0; t < e.idx.size(); ++t) work[e.idx[t]] -= e.val[t] * zp;
        }
    }

    // z^T B = c^T, in place on `work`.
    void btran() {
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double s = work[it->pivot_row];
            for (std::size_t t = 0; t < it->idx.size(); ++t) s -= it->val[t] * work[it->idx[t]];
            work[it->pivot_row] = s / it->pivot;
        }
        work = lu.transpose().solve(work).eval();
    }

    void recompute_basic() {
        work.setZero();
        for (int j = 0; j < total; ++j) {
            if (state[j] == VarState::Basic || x[j] == 0.0) continue;
            const double xj = x[j];
            for_column(j, [&](int r, double v) { work[r] -= v * xj; });
        }
        ftran();
        for (int i = 0; i < m; ++i) x[head[i]] = work[i];
    }

    void init(std::span<const double> lower, std::span<const double> upper) {
        lo.assign(total, 0.0);
        up.assign(total, 0.0);
        x.assign(total, 0.0);
        state.assign(total, VarState::AtLower);
        art_sign.assign(m, 1.0);
        head.assign(m, 0);
        iterations = 0;
        for (int j = 0; j < n; ++j) {
            lo[j] = lower[j];
            up[j] = upper[j];
            if (std::isfinite(lo[j])) {
                x[j] = lo[j];
                state[j] = VarState::AtLower;
            } else if (std::isfinite(up[j])) {
                x[j] = up[j];
                state[j] = VarState::AtUpper;
            } else {
                x[j] = 0.0;
                state[j] = VarState::FreeZero;
            }
        }
        std::vector<double> residual(m, 0.0);
        for (int j = 0; j < n; ++j) {
            if (x[j] == 0.0) continue;
            for (int p = col_start[j]; p < col_start[j + 1]; ++p) residual[row_idx[p]] += values[p] * x[j];
        }
        for (int r = 0; r < m; ++r) {
            const int s = n + r;
            lo[s] = logical_lower[r];
            up[s] = logical_upper[r];
            if (std::isfinite(lo[s])) {
                x[s] = lo[s];
                state[s] = VarState::AtLower;
            } else {
                x[s] = up[s];
                state[s] = VarState::AtUpper;
            }
            residual[r] -= x[s];
            const int a = n + m + r;
            art_sign[r] = residual[r] > 0.0 ? -1.0 : 1.0;
            lo[a] = 0.0;
            up[a] = kInf;
            x[a] = std::abs(residual[r]);
            state[a] = VarState::Basic;
            head[r] = a;
        }
    }

    // Returns false when unbounded.
    bool run() {
        int stall = 0;
        bool bland = false;
        for (;;) {
            if (iterations >= opt.max_iterations)
                throw NumericalBreakdown("simplex iteration limit reached");
            if (static_cast<int>(etas.size()) >= opt.refactor_interval) {
                refactor();
                recompute_basic();
            }

            for (int i = 0; i < m; ++i) work[i] = cost[head[i]];
            btran();
            const Eigen::VectorXd y = work;

            int q = -1;
            double dir = 0.0;
            double best = 0.0;
            double dq = 0.0;
            for (int j = 0; j < total; ++j) {
                const VarState st = state[j];
                if (st == VarState::Basic || lo[j] == up[j]) continue;
                const double d = cost[j] - column_dot(j, y);
                double s = 0.0;
                if (st == VarState::AtLower) {
                    if (d < -opt.optimality_tol) s = 1.0;
                } else if (st == VarState::AtUpper) {
                    if (d > opt.optimality_tol) s = -1.0;
                } else if (std::abs(d) > opt.optimality_tol) {
                    s = d < 0.0 ? 1.0 : -1.0;
                }
                if (s == 0.0) continue;
                if (bland) {
                    q = j;
                    dir = s;
                    dq = d;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = s;
                    dq = d;
                }
            }
            if (q < 0) return true;

            work.setZero();
            for_column(q, [&](int r, double v) { work[r] = v; });
            ftran();
            for (int i = 0; i < m; ++i) alpha[i] = work[i];

            // Harris two-pass ratio test; Bland mode uses the textbook minimum ratio.
            const double ftol = opt.feasibility_tol;
            double t_max = kInf;
            if (!bland) {
                for (int i = 0; i < m; ++i) {
                    const double delta = -dir * alpha[i];
                    if (std::abs(delta) <= opt.pivot_tol) continue;
                    const int b = head[i];
                    if (delta < 0.0 && std::isfinite(lo[b]))
                        t_max = std::min(t_max, (x[b] - lo[b] + ftol) / -delta);
                    else if (delta > 0.0 && std::isfinite(up[b]))
                        t_max = std::min(t_max, (up[b] - x[b] + ftol) / delta);
                }
            }
            int p = -1;
            double t = kInf;
            double best_delta = 0.0;
            for (int i = 0; i < m; ++i) {
                const double delta = -dir * alpha[i];
                if (std::abs(delta) <= opt.pivot_tol) continue;
                const int b = head[i];
                double ti;
                if (delta < 0.0 && std::isfinite(lo[b]))
                    ti = std::max(0.0, (x[b] - lo[b]) / -delta);
                else if (delta > 0.0 && std::isfinite(up[b]))
                    ti = std::max(0.0, (up[b] - x[b]) / delta);
                else
                    continue;
                if (bland) {
                    if (ti < t || (ti == t && p >= 0 && b < head[p])) {
                        t = ti;
                        p = i;
                    }
                } else if (ti <= t_max && std::abs(delta) > best_delta) {
                    best_delta = std::abs(delta);
                    t = ti;
                    p = i;
                }
            }

            const double range = up[q] - lo[q];
            const bool flip = std::isfinite(range) && range <= t;
            if (flip) t = range;
            if (!std::isfinite(t)) return false;

            for (int i = 0; i < m; ++i)
                if (alpha[i] != 0.0) x[head[i]] -= dir * alpha[i] * t;
            x[q] += dir * t;
            ++iterations;

            if (std::abs(dq * t) <= 1e-12) {
                if (++stall >= opt.stall_limit) bland = true;
            } else {
                stall = 0;
                bland = false;
            }

            if (flip) {
                state[q] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
                x[q] = dir > 0.0 ? up[q] : lo[q];
                continue;
            }

            const int leaving = head[p];
            const double delta_p = -dir * alpha[p];
            if (delta_p < 0.0) {
                x[leaving] = lo[leaving];
                state[leaving] = VarState::AtLower;
            } else {
                x[leaving] = up[leaving];
                state[leaving] = lo[leaving] == up[leaving] ? VarState::AtLower : VarState::AtUpper;
            }
            head[p] = q;
            state[q] = VarState::Basic;

            Eta e;
            e.pivot_row = p;
            e.pivot = alpha[p];
            for (int i = 0; i < m; ++i) {
                if (i != p && alpha[i] != 0.0) {
                    e.idx.push_back(i);
                    e.val.push_back(alpha[i]);
                }
            }
            etas.push_back(std::move(e));
        }
    }

    LpSolution solve_without_rows(std::span<const double> lower, std::span<const double> upper) {
        LpSolution sol;
        sol.x.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            if (lower[j] > upper[j]) return sol;
            const double c = cost_struct[j];
            double v;
            if (c > 0.0) v = lower[j];
            else if (c < 0.0) v = upper[j];
            else v = std::isfinite(lower[j]) ? lower[j] : (std::isfinite(upper[j]) ? upper[j] : 0.0);
            if (!std::isfinite(v)) {
                sol.status = LpStatus::Unbounded;
                return sol;
            }
            sol.x[j] = v;
        }
        sol.status = LpStatus::Optimal;
        sol.objective = dot(cost_struct, sol.x);
        return sol;
    }

    LpSolution solve(std::span<const double> lower, std::span<const double> upper) {
        for (int j = 0; j < n; ++j) {
            if (lower[j] > upper[j]) {
                LpSolution sol;
                sol.x.assign(n, 0.0);
                return sol;
            }
        }
        if (m == 0) return solve_without_rows(lower, upper);

        init(lower, upper);
        refactor();

        LpSolution sol;
        cost.assign(total, 0.0);
        for (int r = 0; r < m; ++r) cost[n + m + r] = 1.0;
        run();
        double infeasibility = 0.0;
        for (int r = 0; r < m; ++r) infeasibility += x[n + m + r];
        if (infeasibility > opt.infeasibility_tol * rhs_scale) {
            sol.x.assign(x.begin(), x.begin() + n);
            sol.iterations = iterations;
            sol.status = LpStatus::Infeasible;
            return sol;
        }

        for (int r = 0; r < m; ++r) up[n + m + r] = 0.0;
        std::fill(cost.begin(), cost.end(), 0.0);
        std::copy(cost_struct.begin(), cost_struct.end(), cost.begin());
        refactor();
        recompute_basic();
        const bool bounded = run();
        refactor();
        recompute_basic();

        sol.iterations = iterations;
        sol.x.assign(x.begin(), x.begin() + n);
        for (int j = 0; j < n; ++j) sol.x[j] = std::clamp(sol.x[j], lo[j], up[j]);
        sol.objective = dot(cost_struct, sol.x);
        sol.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
        return sol;
    }
};

SimplexSolver::SimplexSolver(const LinearProgram& lp, LpOptions options)
    : impl_(std::make_unique<Impl>(lp, options)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::solve(std::span<const double> lower, std::span<const double> upper) {
    return impl_->solve(lower, upper);
}

LpSolution SimplexSolver::solve() { return impl_->solve(impl_->default_lower, impl_->default_upper); }

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
    SimplexSolver solver(lp, options);
    return solver.solve();
}

}  // namespace scnd
