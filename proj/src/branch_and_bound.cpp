#include "scnd/branch_and_bound.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "scnd/error.hpp"

namespace scnd {

const char* to_string(MilpStatus s) {
    switch (s) {
        case MilpStatus::Optimal: return "Optimal";
        case MilpStatus::FeasibleWithGap: return "FeasibleWithGap";
        case MilpStatus::Infeasible: return "Infeasible";
        case MilpStatus::TimeLimit: return "TimeLimit";
    }
    return "?";
}

void validate(const SolverConfig& cfg) {
    if (!(cfg.gap_tolerance > 0.0) || !(cfg.feasibility_tolerance > 0.0) ||
        !(cfg.integrality_tolerance > 0.0))
        throw ConfigError("solver tolerances must be positive");
    if (!(cfg.time_limit_seconds >= 0.0)) throw ConfigError("time limit must be nonnegative");
    if (cfg.node_limit < 0) throw ConfigError("node limit must be nonnegative");
}

namespace {

struct Node {
    double key = 0.0;  // lower bound inherited from the parent
    long seq = 0;
    std::vector<std::int8_t> fix;  // per binary: -1 free, 0 or 1 fixed
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.key != b.key) return a.key > b.key;
        return a.seq > b.seq;
    }
};

double relative_gap(double incumbent, double bound) {
    if (!std::isfinite(incumbent)) return kInf;
    if (!std::isfinite(bound)) return kInf;
    const double diff = std::max(0.0, incumbent - bound);
    if (diff == 0.0) return 0.0;
    return diff / std::max(std::abs(incumbent), 1e-9);
}

class BranchAndBound {
public:
    BranchAndBound(const MilpProblem& problem, const SolverConfig& cfg)
        : problem_(problem), cfg_(cfg), lp_(problem.lp) {
        for (int j = 0; j < problem.n_vars(); ++j)
            if (problem.integrality[j]) binaries_.push_back(j);
        lower_ = problem.lp.lower;
        upper_ = problem.lp.upper;
    }

    MilpSolution run() {
        using clock = std::chrono::steady_clock;
        const auto start = clock::now();
        const auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

        std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
        open.push(Node{-kInf, 0, std::vector<std::int8_t>(binaries_.size(), -1)});
        long seq = 1;
        double pruned_min = kInf;
        bool time_hit = false;
        bool node_hit = false;

        while (!open.empty()) {
            const double lb = std::min(open.top().key, pruned_min);
            if (has_incumbent() && relative_gap(best_.objective, lb) <= cfg_.gap_tolerance) break;
            if (elapsed() >= cfg_.time_limit_seconds) {
                time_hit = true;
                break;
            }
            if (best_.nodes_explored >= cfg_.node_limit) {
                node_hit = true;
                break;
            }

            Node node = open.top();
            open.pop();
            ++best_.nodes_explored;
            apply(node.fix);
            LpSolution lp = lp_.solve(lower_, upper_);
            best_.lp_iterations += lp.iterations;
            if (lp.status == LpStatus::Unbounded)
                throw NumericalBreakdown("node " + std::to_string(best_.nodes_explored) +
                                         ": LP relaxation unbounded");
            if (cfg_.record_trace)
                best_.trace.push_back({best_.nodes_explored, lb, best_.objective});
            if (lp.status == LpStatus::Infeasible) continue;

            const double bound = std::max(node.key, lp.objective);
            if (has_incumbent() && bound >= best_.objective - cfg_.gap_tolerance * std::abs(best_.objective)) {
                if (bound < best_.objective) pruned_min = std::min(pruned_min, bound);
                continue;
            }

            const int branch = most_fractional(lp.x);
            if (branch < 0) {
                try_fixed(lp.x, false);
                continue;
            }
            if (best_.nodes_explored == 1 || best_.nodes_explored % 16 == 0) {
                try_fixed(lp.x, true);
                if (bound >= best_.objective - cfg_.gap_tolerance * std::abs(best_.objective)) {
                    if (bound < best_.objective) pruned_min = std::min(pruned_min, bound);
                    continue;
                }
            }

            spdlog::debug("node {} bound {:.6g} incumbent {:.6g} open {}", best_.nodes_explored, bound,
                          best_.objective, open.size());
            for (std::int8_t v : {std::int8_t{0}, std::int8_t{1}}) {
                Node child{bound, seq++, node.fix};
                child.fix[branch] = v;
                open.push(std::move(child));
            }
        }

        double lb = std::min(open.empty() ? kInf : open.top().key, pruned_min);
        if (has_incumbent()) {
            lb = std::min(lb, best_.objective);
            best_.bound = lb;
            best_.gap = relative_gap(best_.objective, lb);
            if (best_.gap <= cfg_.gap_tolerance) best_.status = MilpStatus::Optimal;
            else if (time_hit) best_.status = MilpStatus::TimeLimit;
            else best_.status = MilpStatus::FeasibleWithGap;
        } else if (time_hit || node_hit) {
            best_.status = MilpStatus::TimeLimit;
            best_.bound = lb;
        } else {
            best_.status = MilpStatus::Infeasible;
        }
        spdlog::debug("branch and bound: {} after {} nodes, objective {:.10g}, gap {:.3g}",
                      to_string(best_.status), best_.nodes_explored, best_.objective, best_.gap);
        return std::move(best_);
    }

private:
    bool has_incumbent() const { return best_.has_incumbent(); }

    void apply(const std::vector<std::int8_t>& fix) {
        for (std::size_t b = 0; b < binaries_.size(); ++b) {
            const int j = binaries_[b];
            if (fix[b] < 0) {
                lower_[j] = problem_.lp.lower[j];
                upper_[j] = problem_.lp.upper[j];
            } else {
                lower_[j] = upper_[j] = fix[b];
            }
        }
    }

    // Branching variable position in binaries_, or -1 when integral.
    int most_fractional(const std::vector<double>& x) const {
        int pick = -1;
        double best = cfg_.integrality_tolerance;
        for (std::size_t b = 0; b < binaries_.size(); ++b) {
            const double v = x[binaries_[b]];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > best) {
                best = frac;
                pick = static_cast<int>(b);
            }
        }
        return pick;
    }

    // Fix every binary (rounded, or rounded up when `round_up`) and solve the
    // continuous remainder; keeps the result if it improves the incumbent.
    void try_fixed(const std::vector<double>& x, bool round_up) {
        for (int j : binaries_) {
            const double v = round_up ? (x[j] > cfg_.integrality_tolerance ? 1.0 : 0.0) : std::round(x[j]);
            lower_[j] = upper_[j] = std::clamp(v, problem_.lp.lower[j], problem_.lp.upper[j]);
        }
        LpSolution lp = lp_.solve(lower_, upper_);
        best_.lp_iterations += lp.iterations;
        if (lp.status != LpStatus::Optimal) return;
        if (max_violation(problem_.lp, lp.x) > cfg_.feasibility_tolerance) {
            spdlog::warn("discarding candidate incumbent with violation {:.3g}",
                         max_violation(problem_.lp, lp.x));
            return;
        }
        if (lp.objective < best_.objective) {
            best_.objective = lp.objective;
            best_.x = std::move(lp.x);
            spdlog::debug("new incumbent {:.10g}", best_.objective);
        }
    }

    const MilpProblem& problem_;
    const SolverConfig& cfg_;
    SimplexSolver lp_;
    std::vector<int> binaries_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    MilpSolution best_;
};

}  // namespace

MilpSolution solve_milp(const MilpProblem& problem, const SolverConfig& cfg) {
    validate(cfg);
    if (problem.integrality.size() != static_cast<std::size_t>(problem.n_vars()))
        throw InvalidInstance("integrality mask size does not match the column count");
    for (int j = 0; j < problem.n_vars(); ++j) {
        if (problem.integrality[j] && (problem.lp.lower[j] < 0.0 || problem.lp.upper[j] > 1.0))
            throw InvalidInstance("integer columns must be binaries with bounds inside [0, 1]");
    }
    return BranchAndBound(problem, cfg).run();
}

}  // namespace scnd
