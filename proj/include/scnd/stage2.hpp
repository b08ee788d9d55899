#pragma once

#include <cstdint>
#include <vector>

#include "scnd/model.hpp"
#include "scnd/stage1.hpp"

namespace scnd {

/// How customers are split into the low- and high-deficit regimes.
enum class RegimeRule {
    Midpoint,  // low iff delta_k <= (min + max) / 2
    Mean,      // low iff delta_k <= mean deficit across customers
};

enum class DemandMode {
    Sampled,  // one draw of N(mu_k, sigma_k^2) per customer, clamped at zero
    Mean,     // realized demand is mu_k
};

enum class Deviation { Shortage, Surplus };

const char* to_string(RegimeRule r);
const char* to_string(DemandMode m);
const char* to_string(Deviation d);

struct Stage2Options {
    RegimeRule rule = RegimeRule::Midpoint;
    DemandMode demand_mode = DemandMode::Sampled;
    std::uint64_t seed = 0;
};

struct DeficitProfile {
    std::vector<double> delta;  // |realized demand - delivered|
    double delta_lo = 0.0;
    double delta_mid = 0.0;
    double delta_hi = 0.0;
    std::vector<std::uint8_t> lambda;  // low-deficit regime
    std::vector<std::uint8_t> zeta;    // high-deficit regime
    double delta_bar = 0.0;            // mean deficit across customers
    double sigma_delta = 0.0;
    std::vector<Deviation> sign;
    /// Every delta equal: the regimes cannot be told apart and all customers
    /// are placed in the low regime.
    bool degenerate = false;
    RegimeRule rule = RegimeRule::Midpoint;
};

struct RecoveryPlan {
    std::size_t n_warehouses = 0;
    std::size_t n_customers = 0;
    std::vector<std::uint8_t> kq;     // row-major warehouses x customers
    std::vector<std::uint8_t> omega;  // row-major warehouses x customers
    Grid r;
    Grid e;
    std::vector<double> qu;
    std::vector<double> qo;
    std::vector<int> warehouse;  // recovering warehouse per customer, -1 if none
    std::size_t clamp_events = 0;
};

struct Probabilities {
    std::vector<double> p_under;
    std::vector<double> p_over;
    /// Customers whose demand spread is zero; their p_under is a step in {0, 1/2, 1}.
    std::vector<std::uint8_t> zero_sigma;
};

/// The pieces TC1 is built from.
struct Stage2Cost {
    double tc = 0.0;
    double overstock = 0.0;   // sum c_po * e
    double understock = 0.0;  // sum c_pu * r
    double lead_time = 0.0;   // sum sigma_delta * sqrt(eld)
    double tc1 = 0.0;
};

struct Stage2Report {
    std::vector<double> realized_demand;
    std::vector<double> delta_mean;  // per-customer |mu_k - delivered|
    DeficitProfile profile;
    RecoveryPlan plan;
    Probabilities probabilities;
    std::vector<double> eld;
    Stage2Cost cost;
};

/// Realized demand per customer according to `options.demand_mode`.
std::vector<double> realize_demand(const InstanceSpec& spec, const Stage2Options& options);

/// Sum over warehouses of the delivered quantity per customer.
std::vector<double> delivered(const Stage1Solution& sol);

/// Sample spread of the deficits around their mean: sqrt(sum (d - mean)^2) / (n - 1).
/// Zero for fewer than two customers.
double deficit_spread(const std::vector<double>& delta, double mean);

DeficitProfile compute_deficits(const InstanceSpec& spec, const Stage1Solution& sol,
                                const std::vector<double>& realized_demand,
                                RegimeRule rule = RegimeRule::Midpoint);

/// For every customer with a positive deficit, activates the cheapest open
/// warehouse for the customer's regime and sets the recovery quantity at its
/// lower limit. Throws NoWarehouseOpen when a deficit exists but no warehouse
/// is open.
RecoveryPlan plan_recovery(const InstanceSpec& spec, const Stage1Solution& sol, const DeficitProfile& profile);

/// p_under = (1 + erf((qu - delta_mean) / (sigma sqrt 2))) / 2, p_over = 1 - p_under.
Probabilities stockout_probabilities(const std::vector<double>& qu, const std::vector<double>& delta_mean,
                                     const std::vector<double>& sigma);

std::vector<double> expected_lead_time(const DeficitProfile& profile, const Probabilities& prob,
                                       double t_lower, double t_upper);

Stage2Cost total_cost_stage2(const Stage1Solution& sol, const RecoveryPlan& plan, const DeficitProfile& profile,
                             const std::vector<double>& eld, const CostParams& costs);

/// The whole second stage on a solved network.
Stage2Report run_stage2(const InstanceSpec& spec, const Stage1Solution& sol, const Stage2Options& options = {});

}  // namespace scnd
