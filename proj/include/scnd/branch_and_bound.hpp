#pragma once

#include <limits>
#include <vector>

#include "scnd/milp_problem.hpp"
#include "scnd/simplex.hpp"

namespace scnd {

enum class MilpStatus { Optimal, FeasibleWithGap, Infeasible, TimeLimit };

const char* to_string(MilpStatus s);

enum class BranchingRule { MostFractional };

struct SolverConfig {
    double gap_tolerance = 1e-2;  // relative
    double time_limit_seconds = 60.0;
    long node_limit = std::numeric_limits<long>::max();
    BranchingRule branching = BranchingRule::MostFractional;
    double feasibility_tolerance = 1e-6;
    double integrality_tolerance = 1e-6;
    /// Record every processed node in MilpSolution::trace.
    bool record_trace = false;
};

/// Throws ConfigError unless every tolerance is positive.
void validate(const SolverConfig& cfg);

struct NodeTrace {
    long node = 0;
    double lower_bound = 0.0;
    double incumbent = std::numeric_limits<double>::infinity();
};

struct MilpSolution {
    std::vector<double> x;  // empty when there is no incumbent
    double objective = std::numeric_limits<double>::infinity();
    double bound = -std::numeric_limits<double>::infinity();
    MilpStatus status = MilpStatus::Infeasible;
    double gap = std::numeric_limits<double>::infinity();
    long nodes_explored = 0;
    long lp_iterations = 0;
    std::vector<NodeTrace> trace;

    bool has_incumbent() const noexcept { return !x.empty(); }
};

/// Best-bound-first branch and bound over the binary columns of `problem`.
///
/// Each node LP is solved from scratch. Branching picks the most fractional
/// binary (lowest column on ties); equal-bound nodes are processed FIFO.
/// Whenever a node LP is integral, or after rounding every fractional binary
/// up, the binaries are fixed and the remaining LP is solved to produce an
/// exactly feasible incumbent.
MilpSolution solve_milp(const MilpProblem& problem, const SolverConfig& cfg = {});

}  // namespace scnd
