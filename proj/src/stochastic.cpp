#include "scnd/stochastic.hpp"

#include <omp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace scnd {

const char* to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Gaussian: return "gaussian";
        case NoiseFamily::Lognormal: return "lognormal";
        case NoiseFamily::Pareto: return "pareto";
    }
    return "?";
}

NoiseFamily parse_noise_family(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::Gaussian;
    if (name == "lognormal") return NoiseFamily::Lognormal;
    if (name == "pareto") return NoiseFamily::Pareto;
    throw ConfigError("unknown noise family '" + name + "' (expected gaussian, lognormal or pareto)");
}

const char* to_string(VariableGroup g) {
    switch (g) {
        case VariableGroup::P: return "P";
        case VariableGroup::Qij: return "Qij";
        case VariableGroup::Qjk: return "Qjk";
    }
    return "?";
}

double NoiseSpec::effective_log_scale() const { return log_scale ? *log_scale : std::log(scale); }

void validate(const NoiseSpec& s) {
    const auto fail = [&](const std::string& what) {
        throw ConfigError("noise '" + s.label + "': " + what);
    };
    if (s.log_scale) {
        if (std::isnan(*s.log_scale) || *s.log_scale == kInf) fail("log_scale must be a number below +inf");
    } else if (!(s.scale >= 0.0) || !std::isfinite(s.scale)) {
        fail("scale must be finite and nonnegative");
    }
    switch (s.family) {
        case NoiseFamily::Gaussian:
            if (!(s.gaussian_sigma >= 0.0) || !std::isfinite(s.gaussian_sigma)) fail("gaussian_sigma must be >= 0");
            break;
        case NoiseFamily::Lognormal:
            if (!std::isfinite(s.lognormal_mu)) fail("lognormal_mu must be finite");
            if (!(s.lognormal_sigma >= 0.0) || !std::isfinite(s.lognormal_sigma)) fail("lognormal_sigma must be >= 0");
            break;
        case NoiseFamily::Pareto:
            if (!(s.pareto_alpha > 0.0) || !std::isfinite(s.pareto_alpha)) fail("pareto_alpha must be > 0");
            if (!(s.pareto_xm > 0.0) || !std::isfinite(s.pareto_xm)) fail("pareto_xm must be > 0");
            break;
    }
}

double pareto_quantile(double u, double alpha, double xm) { return xm * std::pow(u, -1.0 / alpha); }

double sample_noise(const NoiseSpec& s, Stream& stream) {
    // The raw variates are drawn first so the number of draws per call does
    // not depend on the scale.
    double z = 0.0;
    double u = 1.0;
    if (s.family == NoiseFamily::Pareto) u = stream.uniform_open_closed();
    else z = stream.normal();
    const double sign = s.signed_noise ? stream.rademacher() : 1.0;

    double eta = 0.0;
    if (s.log_scale) {
        const double ls = *s.log_scale;
        switch (s.family) {
            case NoiseFamily::Gaussian: eta = std::exp(ls) * s.gaussian_sigma * z; break;
            case NoiseFamily::Lognormal: eta = std::exp(ls + s.lognormal_mu + s.lognormal_sigma * z); break;
            case NoiseFamily::Pareto: eta = std::exp(ls + std::log(s.pareto_xm) - std::log(u) / s.pareto_alpha); break;
        }
    } else if (s.scale == 0.0) {
        eta = 0.0;
    } else {
        switch (s.family) {
            case NoiseFamily::Gaussian: eta = s.scale * s.gaussian_sigma * z; break;
            case NoiseFamily::Lognormal: eta = s.scale * std::exp(s.lognormal_mu + s.lognormal_sigma * z); break;
            case NoiseFamily::Pareto: eta = s.scale * pareto_quantile(u, s.pareto_alpha, s.pareto_xm); break;
        }
    }
    return eta == 0.0 ? 0.0 : sign * eta;
}

std::vector<NoiseSpec> default_noise_suite() {
    std::vector<NoiseSpec> suite;
    NoiseSpec g;
    g.label = "gaussian";
    g.family = NoiseFamily::Gaussian;
    suite.push_back(g);
    NoiseSpec l;
    l.label = "lognormal";
    l.family = NoiseFamily::Lognormal;
    suite.push_back(l);
    for (const auto& [label, alpha] : {std::pair{"pareto_a0.01", 0.01}, std::pair{"pareto_a0.05", 0.05},
                                       std::pair{"pareto_a0.5", 0.5}, std::pair{"pareto_a0.99", 0.99}}) {
        NoiseSpec p;
        p.label = label;
        p.family = NoiseFamily::Pareto;
        p.pareto_alpha = alpha;
        suite.push_back(p);
    }
    return suite;
}

std::uint64_t cell_key(std::uint64_t seed, std::size_t e, std::size_t e_inner, const std::string& variable) {
    return derive_key(seed, e, e_inner, hash_name(variable));
}

namespace {

// Flat view of the noisy cells of a solution, in ensemble cell order.
struct CellLayout {
    std::size_t I, J, K;
    std::vector<std::uint64_t> name_hash;

    explicit CellLayout(const Stage1Solution& sol)
        : I(sol.p.size()), J(sol.q_ij.cols()), K(sol.q_jk.cols()) {
        name_hash.reserve(size());
        for (std::size_t i = 0; i < I; ++i) name_hash.push_back(hash_name(to_string(VarRef{VarKind::P, i, 0})));
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t j = 0; j < J; ++j) name_hash.push_back(hash_name(to_string(VarRef{VarKind::Qij, i, j})));
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t k = 0; k < K; ++k) name_hash.push_back(hash_name(to_string(VarRef{VarKind::Qjk, j, k})));
    }
    std::size_t size() const { return I + I * J + J * K; }
};

std::vector<double> flatten(const Stage1Solution& s) {
    std::vector<double> v(s.p);
    v.insert(v.end(), s.q_ij.flat().begin(), s.q_ij.flat().end());
    v.insert(v.end(), s.q_jk.flat().begin(), s.q_jk.flat().end());
    return v;
}

enum class Check {
    ProductionUpper,
    ProductionLower,
    PlantFlowNonnegative,
    CustomerFlowNonnegative,
    PlantBalance,
    WarehouseBalance,
    DemandCover,
    PlantArcCapacity,
    CustomerArcCapacity,
    WarehouseSizing,
    WarehouseCapacity,
};

const char* check_name(Check c) {
    switch (c) {
        case Check::ProductionUpper: return "production_upper";
        case Check::ProductionLower: return "production_lower";
        case Check::PlantFlowNonnegative: return "plant_flow_nonnegative";
        case Check::CustomerFlowNonnegative: return "customer_flow_nonnegative";
        case Check::PlantBalance: return "plant_balance";
        case Check::WarehouseBalance: return "warehouse_balance";
        case Check::DemandCover: return "demand_cover";
        case Check::PlantArcCapacity: return "plant_arc_capacity";
        case Check::CustomerArcCapacity: return "customer_arc_capacity";
        case Check::WarehouseSizing: return "warehouse_sizing";
        case Check::WarehouseCapacity: return "warehouse_capacity";
    }
    return "?";
}

// Calls visit(check, a, b, residual) for every row; a positive residual is a
// violation, NaN residuals are reported as +inf. `b` is unused (-1) for rows
// indexed by one node.
template <typename Visit>
void visit_rows(const InstanceSpec& s, const Stage1Solution& base, const double* p, const double* qij,
                const double* qjk, const std::vector<double>& target, Visit&& visit) {
    const std::size_t I = s.n_plants, J = s.n_warehouses, K = s.n_customers;
    const auto emit = [&](Check c, std::size_t a, long b, double r) {
        visit(c, a, b, std::isnan(r) ? kInf : r);
    };
    for (std::size_t i = 0; i < I; ++i) {
        emit(Check::ProductionUpper, i, -1, p[i] - s.p_upper[i]);
        emit(Check::ProductionLower, i, -1, s.p_lower[i] - p[i]);
    }
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) emit(Check::PlantFlowNonnegative, i, j, -qij[i * J + j]);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k) emit(Check::CustomerFlowNonnegative, j, k, -qjk[j * K + k]);
    for (std::size_t i = 0; i < I; ++i) {
        double out = 0.0;
        for (std::size_t j = 0; j < J; ++j) out += qij[i * J + j];
        emit(Check::PlantBalance, i, -1, std::abs(p[i] - out));
    }
    std::vector<double> inflow(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t i = 0; i < I; ++i) inflow[j] += qij[i * J + j];
        double out = 0.0;
        for (std::size_t k = 0; k < K; ++k) out += qjk[j * K + k];
        emit(Check::WarehouseBalance, j, -1, std::abs(inflow[j] + s.inventory[j] - out));
    }
    for (std::size_t k = 0; k < K; ++k) {
        double in = 0.0;
        for (std::size_t j = 0; j < J; ++j) in += qjk[j * K + k];
        emit(Check::DemandCover, k, -1, target[k] - in);
    }
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
            emit(Check::PlantArcCapacity, i, j, qij[i * J + j] - s.q_upper_ij(i, j) * base.x_ij[i * J + j]);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k)
            emit(Check::CustomerArcCapacity, j, k, qjk[j * K + k] - s.q_upper_jk(j, k) * base.x_jk[j * K + k]);
    for (std::size_t j = 0; j < J; ++j) {
        emit(Check::WarehouseSizing, j, -1, s.a[j] * (inflow[j] + s.inventory[j]) - base.w[j]);
        emit(Check::WarehouseCapacity, j, -1, base.w[j] - s.w_upper[j] * base.y[j]);
    }
}

double max_residual(const InstanceSpec& s, const Stage1Solution& base, const double* cells,
                    const std::vector<double>& target) {
    const std::size_t I = s.n_plants, J = s.n_warehouses;
    double worst = 0.0;
    visit_rows(s, base, cells, cells + I, cells + I + I * J, target,
               [&](Check, std::size_t, long, double r) { worst = std::max(worst, r); });
    return worst;
}

void check_options(const NoiseSpec& noise, const EnsembleOptions& o) {
    validate(noise);
    if (o.n == 0) throw ConfigError("ensemble size n must be at least 1");
    if (!(o.feasibility_tolerance > 0.0)) throw ConfigError("feasibility tolerance must be positive");
    if (o.threads < 0) throw ConfigError("thread count must be nonnegative");
}

int thread_count(const EnsembleOptions& o) { return o.threads > 0 ? o.threads : omp_get_max_threads(); }

NoiseEnsemble empty_ensemble(const Stage1Solution& sol, const NoiseSpec& noise, const EnsembleOptions& o) {
    NoiseEnsemble ens;
    ens.noise = noise;
    ens.n = o.n;
    ens.n_plants = sol.p.size();
    ens.n_warehouses = sol.q_ij.cols();
    ens.n_customers = sol.q_jk.cols();
    ens.include_infeasible = o.include_infeasible;
    ens.values.assign(o.n * o.n * ens.cells(), 0.0);
    ens.feasible.assign(o.n, 0);
    ens.max_violation.assign(o.n, 0.0);
    return ens;
}

NoiseEnsemble finish(NoiseEnsemble ens) {
    summarize(ens);
    spdlog::debug("ensemble '{}': {}/{} feasible", ens.noise.label, ens.feasible_count, ens.n);
    if (ens.contributing() < 2) throw TooFewFeasible(std::make_shared<const NoiseEnsemble>(std::move(ens)));
    return ens;
}

// Fills `out` with replicate (e, e') and returns its largest residual.
double draw_replicate(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                      const CellLayout& layout, const std::vector<double>& base, const std::vector<double>& target,
                      std::uint64_t seed, std::size_t e, std::size_t e_inner, double* out) {
    for (std::size_t c = 0; c < base.size(); ++c) {
        Stream stream(derive_key(seed, e, e_inner, layout.name_hash[c]));
        out[c] = base[c] + sample_noise(noise, stream);
    }
    return max_residual(spec, sol, out, target);
}

}  // namespace

PerturbedSolution perturb(const Stage1Solution& sol, const NoiseSpec& noise, std::uint64_t seed, std::size_t e,
                          std::size_t e_inner) {
    PerturbedSolution out;
    static_cast<Stage1Solution&>(out) = sol;
    const auto add = [&](double& v, const VarRef& ref) {
        Stream stream(cell_key(seed, e, e_inner, to_string(ref)));
        v += sample_noise(noise, stream);
        ++out.draws;
    };
    for (std::size_t i = 0; i < out.p.size(); ++i) add(out.p[i], {VarKind::P, i, 0});
    for (std::size_t i = 0; i < out.q_ij.rows(); ++i)
        for (std::size_t j = 0; j < out.q_ij.cols(); ++j) add(out.q_ij(i, j), {VarKind::Qij, i, j});
    for (std::size_t j = 0; j < out.q_jk.rows(); ++j)
        for (std::size_t k = 0; k < out.q_jk.cols(); ++k) add(out.q_jk(j, k), {VarKind::Qjk, j, k});
    return out;
}

FeasibilityReport check_feasibility(const Stage1Solution& pert, const InstanceSpec& spec, double tol,
                                    double safety_factor) {
    const auto target = demand_targets(spec, safety_factor);
    FeasibilityReport rep;
    visit_rows(spec, pert, pert.p.data(), pert.q_ij.flat().data(), pert.q_jk.flat().data(), target,
               [&](Check c, std::size_t a, long b, double r) {
                   rep.max_violation = std::max(rep.max_violation, r);
                   if (r <= tol) return;
                   std::string row = std::string(check_name(c)) + "(" + std::to_string(a);
                   if (b >= 0) row += "," + std::to_string(b);
                   rep.violations.push_back({row + ")", r});
               });
    rep.feasible = rep.violations.empty();
    return rep;
}

std::size_t NoiseEnsemble::group_offset(VariableGroup g) const noexcept {
    switch (g) {
        case VariableGroup::P: return 0;
        case VariableGroup::Qij: return n_plants;
        case VariableGroup::Qjk: return n_plants + n_plants * n_warehouses;
    }
    return 0;
}

std::size_t NoiseEnsemble::group_size(VariableGroup g) const noexcept {
    switch (g) {
        case VariableGroup::P: return n_plants;
        case VariableGroup::Qij: return n_plants * n_warehouses;
        case VariableGroup::Qjk: return n_warehouses * n_customers;
    }
    return 0;
}

bool NoiseEnsemble::operator==(const NoiseEnsemble& o) const {
    const auto same_rms = [](const GroupRms& a, const GroupRms& b) {
        return a.defined == b.defined && a.negative == b.negative &&
               std::memcmp(&a.radicand, &b.radicand, sizeof(double)) == 0 &&
               std::memcmp(&a.value, &b.value, sizeof(double)) == 0;
    };
    const auto same_bits = [](const std::vector<double>& a, const std::vector<double>& b) {
        return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    };
    return n == o.n && n_plants == o.n_plants && n_warehouses == o.n_warehouses && n_customers == o.n_customers &&
           same_bits(values, o.values) && same_bits(means, o.means) && feasible == o.feasible &&
           same_bits(max_violation, o.max_violation) && feasible_count == o.feasible_count &&
           include_infeasible == o.include_infeasible && same_bits(cell_mean, o.cell_mean) &&
           same_rms(rms[0], o.rms[0]) && same_rms(rms[1], o.rms[1]) && same_rms(rms[2], o.rms[2]);
}

TooFewFeasible::TooFewFeasible(std::shared_ptr<const NoiseEnsemble> ensemble)
    : Error("ensemble '" + ensemble->noise.label + "' has " + std::to_string(ensemble->contributing()) +
            " contributing replicates out of " + std::to_string(ensemble->n) + "; RMS needs at least 2"),
      ensemble_(std::move(ensemble)) {}

double ensemble_mean(std::span<const double> row) {
    if (row.empty()) throw SingleCell("ensemble mean of an empty row");
    const double lo = *std::min_element(row.begin(), row.end());
    if (!std::isfinite(lo)) {
        double s = 0.0;
        for (double v : row) s += v;
        return s / static_cast<double>(row.size());
    }
    double s = 0.0;
    for (double v : row) s += v - lo;
    return lo + s / static_cast<double>(row.size());
}

namespace {

double pairwise_mean_product(std::span<const double> x) {
    const std::size_t n = x.size();
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) s += x[a] * x[b];
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return s / pairs;
}

}  // namespace

double ensemble_rms(std::span<const double> means) {
    if (means.size() < 2) throw SingleCell("RMS needs at least two replicate means");
    const double r = pairwise_mean_product(means);
    if (r < 0.0) throw NegativeRadicand(r);
    return std::sqrt(r);
}

void summarize(NoiseEnsemble& ens) {
    const std::size_t C = ens.cells(), n = ens.n;
    ens.means.assign(n * C, 0.0);
    std::vector<double> row(n);
    for (std::size_t e = 0; e < n; ++e)
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t ei = 0; ei < n; ++ei) row[ei] = ens.value(e, ei, c);
            ens.means[e * C + c] = ensemble_mean(row);
        }
    ens.feasible_count = static_cast<std::size_t>(std::count(ens.feasible.begin(), ens.feasible.end(), 1));

    std::vector<std::size_t> used;
    for (std::size_t e = 0; e < n; ++e)
        if (ens.include_infeasible || ens.feasible[e]) used.push_back(e);

    ens.cell_mean.assign(C, std::numeric_limits<double>::quiet_NaN());
    if (!used.empty()) {
        std::vector<double> col(used.size());
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t u = 0; u < used.size(); ++u) col[u] = ens.mean(used[u], c);
            ens.cell_mean[c] = ensemble_mean(col);
        }
    }

    for (auto g : {VariableGroup::P, VariableGroup::Qij, VariableGroup::Qjk}) {
        GroupRms& out = ens.rms[static_cast<int>(g)];
        out = GroupRms{};
        out.value = std::numeric_limits<double>::quiet_NaN();
        if (used.size() < 2) continue;
        std::vector<double> totals;
        for (std::size_t e : used) {
            double t = 0.0;
            for (std::size_t c = 0; c < ens.group_size(g); ++c) t += ens.mean(e, ens.group_offset(g) + c);
            totals.push_back(t);
        }
        out.defined = true;
        out.radicand = pairwise_mean_product(totals);
        if (out.radicand < 0.0) out.negative = true;
        else out.value = std::sqrt(out.radicand);
    }
}

NoiseEnsemble run_ensemble(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                           const EnsembleOptions& o) {
    check_options(noise, o);
    NoiseEnsemble ens = empty_ensemble(sol, noise, o);
    const CellLayout layout(sol);
    const auto base = flatten(sol);
    const auto target = demand_targets(spec, o.safety_factor);
    const std::size_t C = ens.cells(), n = o.n;
    const long outer = static_cast<long>(n);

#pragma omp parallel for schedule(dynamic) num_threads(thread_count(o))
    for (long e = 0; e < outer; ++e) {
        double worst = 0.0;
        for (std::size_t ei = 0; ei < n; ++ei) {
            double* out = &ens.values[(e * n + ei) * C];
            worst = std::max(worst, draw_replicate(spec, sol, ens.noise, layout, base, target, o.seed, e, ei, out));
        }
        ens.max_violation[e] = worst;
        ens.feasible[e] = worst <= o.feasibility_tolerance;
    }
    return finish(std::move(ens));
}

NoiseEnsemble run_ensemble_serial(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                                  const EnsembleOptions& o) {
    check_options(noise, o);
    NoiseEnsemble ens = empty_ensemble(sol, noise, o);
    const std::size_t C = ens.cells(), n = o.n;
    for (std::size_t e = 0; e < n; ++e) {
        bool ok = true;
        double worst = 0.0;
        for (std::size_t ei = 0; ei < n; ++ei) {
            const auto pert = perturb(sol, noise, o.seed, e, ei);
            const auto flat = flatten(pert);
            std::copy(flat.begin(), flat.end(), ens.values.begin() + static_cast<long>((e * n + ei) * C));
            const auto rep = check_feasibility(pert, spec, o.feasibility_tolerance, o.safety_factor);
            ok = ok && rep.feasible;
            worst = std::max(worst, rep.max_violation);
        }
        ens.feasible[e] = ok;
        ens.max_violation[e] = worst;
    }
    return finish(std::move(ens));
}

std::size_t count_feasible(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                           const EnsembleOptions& o) {
    check_options(noise, o);
    const CellLayout layout(sol);
    const auto base = flatten(sol);
    const auto target = demand_targets(spec, o.safety_factor);
    const long outer = static_cast<long>(o.n);
    std::size_t count = 0;

#pragma omp parallel num_threads(thread_count(o))
    {
        std::vector<double> buf(base.size());
#pragma omp for schedule(dynamic) reduction(+ : count)
        for (long e = 0; e < outer; ++e) {
            bool ok = true;
            for (std::size_t ei = 0; ei < o.n && ok; ++ei)
                ok = draw_replicate(spec, sol, noise, layout, base, target, o.seed, e, ei, buf.data()) <=
                     o.feasibility_tolerance;
            count += ok;
        }
    }
    return count;
}

NoiseSpec calibrate_scale(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                          const EnsembleOptions& o, double target_fraction) {
    if (!(target_fraction > 0.0 && target_fraction <= 1.0))
        throw ConfigError("calibration target fraction must lie in (0, 1]");
    const auto need = static_cast<std::size_t>(std::ceil(target_fraction * static_cast<double>(o.n)));
    NoiseSpec trial = noise;
    const auto passes = [&](double ls) {
        trial.log_scale = ls;
        return count_feasible(spec, sol, trial, o) >= need;
    };

    // Bracket [lo, hi] with passes(lo) and !passes(hi), then bisect in log space.
    constexpr double floor_log = -20000.0;
    constexpr double ceil_log = 700.0;
    double lo = std::log(o.feasibility_tolerance);
    double hi = lo;
    if (passes(lo)) {
        double step = 1.0;
        do {
            lo = hi;
            hi = std::min(ceil_log, hi + step);
            step *= 2.0;
        } while (hi < ceil_log && passes(hi));
        if (hi >= ceil_log && passes(hi)) lo = hi;
    } else {
        double step = 1.0;
        do {
            hi = lo;
            lo = std::max(floor_log, lo - step);
            step *= 2.0;
        } while (lo > floor_log && !passes(lo));
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid)) lo = mid;
        else hi = mid;
    }
    trial.log_scale = lo;
    spdlog::info("calibrated '{}' to log scale {:.6g} (scale {:.6g})", noise.label, lo, std::exp(lo));
    return trial;
}

}  // namespace scnd
