#include "scnd/stage2.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scnd/error.hpp"
#include "scnd/rng.hpp"
#include "scnd/special.hpp"

namespace scnd {

const char* to_string(RegimeRule r) { return r == RegimeRule::Midpoint ? "midpoint" : "mean"; }
const char* to_string(DemandMode m) { return m == DemandMode::Sampled ? "sampled" : "mean"; }
const char* to_string(Deviation d) { return d == Deviation::Shortage ? "shortage" : "surplus"; }

std::vector<double> realize_demand(const InstanceSpec& spec, const Stage2Options& options) {
    std::vector<double> d(spec.n_customers);
    const std::uint64_t stream_id = hash_name("realized_demand");
    for (std::size_t k = 0; k < spec.n_customers; ++k) {
        const auto& dem = spec.demand[k];
        if (options.demand_mode == DemandMode::Mean) {
            d[k] = dem.mu;
            continue;
        }
        Stream s(derive_key(options.seed, stream_id, k));
        d[k] = std::max(0.0, dem.mu + dem.sigma * s.normal());
    }
    return d;
}

std::vector<double> delivered(const Stage1Solution& sol) {
    std::vector<double> out(sol.q_jk.cols(), 0.0);
    for (std::size_t j = 0; j < sol.q_jk.rows(); ++j)
        for (std::size_t k = 0; k < sol.q_jk.cols(); ++k) out[k] += sol.q_jk(j, k);
    return out;
}

double deficit_spread(const std::vector<double>& delta, double mean) {
    const std::size_t n = delta.size();
    if (n < 2) return 0.0;
    double ss = 0.0;
    for (double d : delta) ss += (d - mean) * (d - mean);
    return std::sqrt(ss) / static_cast<double>(n - 1);
}

DeficitProfile compute_deficits(const InstanceSpec& spec, const Stage1Solution& sol,
                                const std::vector<double>& realized_demand, RegimeRule rule) {
    const std::size_t K = spec.n_customers;
    if (realized_demand.size() != K) throw InvalidInstance("realized demand length differs from customer count");
    const auto got = delivered(sol);

    DeficitProfile p;
    p.rule = rule;
    p.delta.resize(K);
    p.sign.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double diff = realized_demand[k] - got[k];
        p.delta[k] = std::abs(diff);
        p.sign[k] = diff > 0 ? Deviation::Shortage : Deviation::Surplus;
    }
    if (K == 0) return p;

    const auto [lo, hi] = std::minmax_element(p.delta.begin(), p.delta.end());
    p.delta_lo = *lo;
    p.delta_hi = *hi;
    p.delta_mid = 0.5 * (p.delta_lo + p.delta_hi);
    double sum = 0.0;
    for (double d : p.delta) sum += d;
    p.delta_bar = sum / static_cast<double>(K);
    p.sigma_delta = deficit_spread(p.delta, p.delta_bar);

    p.degenerate = p.delta_lo == p.delta_hi;
    if (p.degenerate) spdlog::warn("stage 2: all {} deficits equal {:.6g}; every customer in the low regime", K, p.delta_lo);
    const double threshold = rule == RegimeRule::Midpoint ? p.delta_mid : p.delta_bar;
    p.lambda.resize(K);
    p.zeta.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const bool low = p.degenerate || p.delta[k] <= threshold;
        p.lambda[k] = low;
        p.zeta[k] = !low;
    }
    return p;
}

RecoveryPlan plan_recovery(const InstanceSpec& spec, const Stage1Solution& sol, const DeficitProfile& profile) {
    const std::size_t J = spec.n_warehouses, K = spec.n_customers;
    RecoveryPlan plan;
    plan.n_warehouses = J;
    plan.n_customers = K;
    plan.kq.assign(J * K, 0);
    plan.omega.assign(J * K, 0);
    plan.r = Grid(J, K);
    plan.e = Grid(J, K);
    plan.qu.assign(K, 0.0);
    plan.qo.assign(K, 0.0);
    plan.warehouse.assign(K, -1);

    const auto& c = spec.costs;
    for (std::size_t k = 0; k < K; ++k) {
        const double d = profile.delta[k];
        const bool low = profile.lambda[k] != 0;
        if (low) {
            const double q = std::clamp(d, profile.delta_lo, profile.delta_mid);
            plan.qu[k] = q;
            plan.clamp_events += q != d;
        } else {
            const double q = std::clamp(d, profile.delta_mid, profile.delta_hi);
            plan.qo[k] = q;
            plan.clamp_events += q != d;
        }
        if (!(d > 0.0)) continue;

        int best = -1;
        double best_cost = kInf;
        double best_qty = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            if (!sol.y[j]) continue;
            const double qty = low ? spec.gamma(j, k) * spec.h(j, k) : spec.beta(j, k) * (spec.inventory[j] + d);
            const double cost = (low ? c.c_pu(j, k) : c.c_po(j, k)) * qty;
            if (cost < best_cost) {
                best = static_cast<int>(j);
                best_cost = cost;
                best_qty = qty;
            }
        }
        if (best < 0)
            throw NoWarehouseOpen("customer " + std::to_string(k) + " has a deficit of " + std::to_string(d) +
                                  " but no warehouse is open");
        plan.warehouse[k] = best;
        const std::size_t cell = static_cast<std::size_t>(best) * K + k;
        if (low) {
            plan.kq[cell] = 1;
            plan.r(best, k) = best_qty;
        } else {
            plan.omega[cell] = 1;
            plan.e(best, k) = best_qty;
        }
    }
    if (plan.clamp_events > 0)
        spdlog::info("stage 2: {} regime quantities clamped into their interval", plan.clamp_events);
    return plan;
}

Probabilities stockout_probabilities(const std::vector<double>& qu, const std::vector<double>& delta_mean,
                                     const std::vector<double>& sigma) {
    const std::size_t K = qu.size();
    if (delta_mean.size() != K || sigma.size() != K)
        throw InvalidInstance("stockout probability inputs differ in length");
    Probabilities p;
    p.p_under.resize(K);
    p.p_over.resize(K);
    p.zero_sigma.assign(K, 0);
    for (std::size_t k = 0; k < K; ++k) {
        const double diff = qu[k] - delta_mean[k];
        double under;
        if (sigma[k] > 0.0) {
            under = 0.5 * (1.0 + erf(diff / (sigma[k] * std::numbers::sqrt2)));
        } else {
            p.zero_sigma[k] = 1;
            under = diff > 0.0 ? 1.0 : diff < 0.0 ? 0.0 : 0.5;
        }
        p.p_under[k] = under;
        p.p_over[k] = 1.0 - under;
    }
    return p;
}

std::vector<double> expected_lead_time(const DeficitProfile& profile, const Probabilities& prob,
                                       double t_lower, double t_upper) {
    const std::size_t K = profile.delta.size();
    std::vector<double> eld(K);
    for (std::size_t k = 0; k < K; ++k)
        eld[k] = t_upper * prob.p_over[k] * profile.zeta[k] + t_lower * prob.p_under[k] * profile.lambda[k];
    return eld;
}

Stage2Cost total_cost_stage2(const Stage1Solution& sol, const RecoveryPlan& plan, const DeficitProfile& profile,
                             const std::vector<double>& eld, const CostParams& costs) {
    Stage2Cost c;
    c.tc = sol.tc;
    for (std::size_t j = 0; j < plan.n_warehouses; ++j)
        for (std::size_t k = 0; k < plan.n_customers; ++k) {
            c.overstock += costs.c_po(j, k) * plan.e(j, k);
            c.understock += costs.c_pu(j, k) * plan.r(j, k);
        }
    for (double t : eld) c.lead_time += profile.sigma_delta * std::sqrt(t);
    c.tc1 = c.tc + c.overstock + c.understock + c.lead_time;
    return c;
}

Stage2Report run_stage2(const InstanceSpec& spec, const Stage1Solution& sol, const Stage2Options& options) {
    Stage2Report rep;
    rep.realized_demand = realize_demand(spec, options);
    rep.profile = compute_deficits(spec, sol, rep.realized_demand, options.rule);
    rep.plan = plan_recovery(spec, sol, rep.profile);

    const auto got = delivered(sol);
    std::vector<double> sigma(spec.n_customers);
    rep.delta_mean.resize(spec.n_customers);
    for (std::size_t k = 0; k < spec.n_customers; ++k) {
        rep.delta_mean[k] = std::abs(spec.demand[k].mu - got[k]);
        sigma[k] = spec.demand[k].sigma;
    }
    rep.probabilities = stockout_probabilities(rep.plan.qu, rep.delta_mean, sigma);
    rep.eld = expected_lead_time(rep.profile, rep.probabilities, spec.t_lower, spec.t_upper);
    rep.cost = total_cost_stage2(sol, rep.plan, rep.profile, rep.eld, spec.costs);
    spdlog::info("stage 2: TC1 {:.10g} (TC {:.10g}, overstock {:.6g}, understock {:.6g}, lead time {:.6g})",
                 rep.cost.tc1, rep.cost.tc, rep.cost.overstock, rep.cost.understock, rep.cost.lead_time);
    return rep;
}

}  // namespace scnd
