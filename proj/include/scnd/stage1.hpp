#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "scnd/branch_and_bound.hpp"
#include "scnd/milp_problem.hpp"
#include "scnd/model.hpp"

namespace scnd {

struct BuildOptions {
    /// Stage-1 demand target is mu + safety_factor * sigma.
    double safety_factor = 0.0;
};

/// Constraint families of the network design model, in row order.
enum class ConstraintFamily {
    ProductionUpper,   // P_i <= P_i^U (variable bound in the MILP)
    ProductionLower,   // P_i >= P_i^L (variable bound in the MILP)
    PlantBalance,      // P_i = sum_j Q_ij
    WarehouseBalance,  // sum_i Q_ij + I_j = sum_k Q_jk
    DemandCover,       // sum_j Q_jk >= D_k
    PlantLinkOpen,     // X_ij <= Y_j
    CustomerLinkOpen,  // X_jk <= Y_j
    PlantArcCapacity,  // Q_ij <= Q_ij^U X_ij
    CustomerArcCapacity,
    WarehouseSizing,    // W_j >= a_j (sum_i Q_ij + I_j)
    WarehouseCapacity,  // W_j <= W_j^U Y_j
};

const char* to_string(ConstraintFamily f);

/// Builds the stage-1 network design MILP.
///
/// Rows, in order: plant balance (per i, equality), warehouse balance (per j,
/// equality, inventory on the right-hand side), demand cover (per k), plant
/// link (per i,j), customer link (per j,k), plant arc capacity (per i,j),
/// customer arc capacity (per j,k), warehouse sizing (per j), warehouse
/// capacity (per j). Production bounds and arc/warehouse capacities are also
/// set as column bounds. Flows carry variable transport costs, connection
/// binaries carry fixed costs.
MilpProblem build_stage1(const InstanceSpec& spec, const BuildOptions& options = {});

/// Number of rows `build_stage1` emits for the given set sizes.
std::size_t stage1_row_count(std::size_t n_plants, std::size_t n_warehouses, std::size_t n_customers);

struct Stage1Solution {
    std::vector<double> p;
    Grid q_ij;
    Grid q_jk;
    std::vector<double> w;
    std::vector<std::uint8_t> y;
    std::vector<std::uint8_t> x_ij;  // row-major plants x warehouses
    std::vector<std::uint8_t> x_jk;  // row-major warehouses x customers
    double tc = 0.0;
    MilpStatus status = MilpStatus::Infeasible;
    double gap = 0.0;

    bool operator==(const Stage1Solution&) const = default;
};

/// Network cost of `sol`, summed in column order.
double stage1_cost(const InstanceSpec& spec, const Stage1Solution& sol);

/// Maps a solver vector back to named quantities. Binaries are rounded; any
/// binary further than 1e-6 from {0, 1} raises NonIntegralBinary.
Stage1Solution extract_stage1(const InstanceSpec& spec, const MilpProblem& problem,
                              const std::vector<double>& x, MilpStatus status, double gap);

/// Inverse of `extract_stage1`: the column vector of a solution.
std::vector<double> to_columns(const MilpProblem& problem, const Stage1Solution& sol);

struct Stage1Run {
    MilpSolution milp;
    std::optional<Stage1Solution> solution;  // absent without an incumbent
};

/// Builds, solves and extracts; checks the recomputed cost against the solver
/// objective (1e-6 relative) and throws NumericalBreakdown when they disagree.
Stage1Run solve_stage1(const InstanceSpec& spec, const SolverConfig& cfg, const BuildOptions& options = {});

/// Writes the problem in CPLEX LP text format.
void write_lp_format(std::ostream& os, const MilpProblem& problem);

}  // namespace scnd
