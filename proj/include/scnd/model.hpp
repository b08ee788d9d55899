#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace scnd {

/// Dense row-major matrix of doubles indexed by two node sets.
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& flat() const noexcept { return data_; }
    std::vector<double>& flat() noexcept { return data_; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct DemandSpec {
    double mu = 0.0;
    double sigma = 0.0;

    bool operator==(const DemandSpec&) const = default;
};

/// Cost coefficients of the network design objective, in currency units.
struct CostParams {
    std::vector<double> c_prod;  // per plant, per unit produced
    Grid c_var_ij;               // plant -> warehouse, per unit shipped
    Grid c_fix_ij;               // plant -> warehouse, per open arc
    Grid c_var_jk;               // warehouse -> customer, per unit shipped
    Grid c_fix_jk;               // warehouse -> customer, per open arc
    std::vector<double> c_install;
    Grid c_po;  // recovery production for large deficits
    Grid c_pu;  // recovery production for small deficits

    bool operator==(const CostParams&) const = default;
};

/// Every set size, bound, coefficient and cost of one three-echelon network.
///
/// Index conventions: i runs over plants, j over warehouses, k over customers.
/// Matrices named `_ij` are plants x warehouses, `_jk` warehouses x customers.
struct InstanceSpec {
    std::size_t n_plants = 0;
    std::size_t n_warehouses = 0;
    std::size_t n_customers = 0;

    std::vector<double> p_upper;
    std::vector<double> p_lower;
    Grid q_upper_ij;
    Grid q_upper_jk;
    // Lower arc capacities are carried for completeness; no constraint reads them.
    Grid q_lower_ij;
    Grid q_lower_jk;
    std::vector<double> w_upper;
    std::vector<double> inventory;
    std::vector<DemandSpec> demand;
    std::vector<double> a;
    Grid beta;
    Grid gamma;
    Grid h;
    double t_upper = 0.0;
    double t_lower = 0.0;
    CostParams costs;

    bool operator==(const InstanceSpec&) const = default;
};

/// An instance with every array sized to the given set sizes and zero-filled.
InstanceSpec make_zero_instance(std::size_t n_plants, std::size_t n_warehouses,
                                std::size_t n_customers);

struct Violation {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> warnings;

    bool ok() const noexcept { return violations.empty(); }
    bool has_violation(const std::string& field) const;
};

/// Checks every invariant of `spec` and reports all failures, not just the first.
/// Aggregate supply short of aggregate mean demand is reported as a warning.
ValidationReport validate_instance(const InstanceSpec& spec);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform sampling ranges used by `generate_instance`.
struct GenerationRanges {
    Range demand_mu{100.0, 500.0};
    Range demand_cv{0.1, 0.1};  // sigma = cv * mu
    Range p_upper{300.0, 1000.0};
    Range p_lower_fraction{0.0, 0.0};  // p_lower = fraction * p_upper
    Range q_upper_ij{100.0, 800.0};
    Range q_upper_jk{50.0, 500.0};
    Range w_upper{500.0, 3000.0};
    Range inventory{0.0, 50.0};
    double stocked_fraction = 0.5;  // probability that a warehouse holds inventory
    Range a{1.0, 1.2};
    Range beta{0.1, 0.5};
    Range gamma{0.1, 0.5};
    Range h{10.0, 50.0};
    Range t_lower{1.0, 3.0};
    Range t_upper{5.0, 10.0};
    Range c_prod{1.0, 5.0};
    Range c_var_ij{1.0, 10.0};
    Range c_fix_ij{10.0, 40.0};
    Range c_var_jk{1.0, 10.0};
    Range c_fix_jk{10.0, 40.0};
    Range c_install{100.0, 400.0};
    Range c_po{1.0, 5.0};
    Range c_pu{1.0, 5.0};
    // Stage-1 demand target is mu + safety_factor * sigma.
    double safety_factor = 0.0;
};

/// Draws a synthetic instance. A pure function of its arguments.
///
/// Capacities are raised where needed so that an explicit routing of every
/// customer's demand target fits; `p_upper` may only be raised up to the top of
/// its range, and `InfeasibleRanges` is thrown when that is not enough.
InstanceSpec generate_instance(std::uint64_t seed, std::size_t n_plants, std::size_t n_warehouses,
                               std::size_t n_customers, const GenerationRanges& ranges = {});

/// Stage-1 demand target mu + z * sigma per customer.
std::vector<double> demand_targets(const InstanceSpec& spec, double safety_factor);

}  // namespace scnd
