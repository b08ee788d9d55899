#include "scnd/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scnd/error.hpp"
#include "scnd/rng.hpp"

namespace scnd {

InstanceSpec make_zero_instance(std::size_t n_plants, std::size_t n_warehouses,
                                std::size_t n_customers) {
    const auto I = n_plants, J = n_warehouses, K = n_customers;
    InstanceSpec s;
    s.n_plants = I;
    s.n_warehouses = J;
    s.n_customers = K;
    s.p_upper.assign(I, 0.0);
    s.p_lower.assign(I, 0.0);
    s.q_upper_ij = Grid(I, J);
    s.q_upper_jk = Grid(J, K);
    s.q_lower_ij = Grid(I, J);
    s.q_lower_jk = Grid(J, K);
    s.w_upper.assign(J, 0.0);
    s.inventory.assign(J, 0.0);
    s.demand.assign(K, DemandSpec{});
    s.a.assign(J, 0.0);
    s.beta = Grid(J, K);
    s.gamma = Grid(J, K);
    s.h = Grid(J, K);
    s.costs.c_prod.assign(I, 0.0);
    s.costs.c_var_ij = Grid(I, J);
    s.costs.c_fix_ij = Grid(I, J);
    s.costs.c_var_jk = Grid(J, K);
    s.costs.c_fix_jk = Grid(J, K);
    s.costs.c_install.assign(J, 0.0);
    s.costs.c_po = Grid(J, K);
    s.costs.c_pu = Grid(J, K);
    return s;
}

bool ValidationReport::has_violation(const std::string& field) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.field == field; });
}

namespace {

std::string idx(const std::string& name, std::size_t i) {
    return name + "[" + std::to_string(i) + "]";
}

std::string idx(const std::string& name, std::size_t r, std::size_t c) {
    return name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
}

class Checker {
public:
    explicit Checker(ValidationReport& report) : report_(report) {}

    void fail(std::string field, std::string message) {
        report_.violations.push_back({std::move(field), std::move(message)});
    }

    bool length(const std::string& name, std::size_t got, std::size_t want) {
        if (got == want) return true;
        fail(name, "expected " + std::to_string(want) + " entries, got " + std::to_string(got));
        return false;
    }

    bool shape(const std::string& name, const Grid& g, std::size_t rows, std::size_t cols) {
        if (g.rows() == rows && g.cols() == cols && g.size() == rows * cols) return true;
        fail(name, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " +
                       std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
        return false;
    }

    void value(const std::string& field, double v, double lo, double hi) {
        if (!std::isfinite(v)) {
            fail(field, "must be finite");
        } else if (v < lo) {
            fail(field, lo == 0.0 ? "must be nonnegative" : "must be >= " + std::to_string(lo));
        } else if (v > hi) {
            fail(field, "must be <= " + std::to_string(hi));
        }
    }

    void vec(const std::string& name, const std::vector<double>& v, std::size_t n,
             double lo = 0.0, double hi = HUGE_VAL) {
        if (!length(name, v.size(), n)) return;
        for (std::size_t i = 0; i < n; ++i) value(idx(name, i), v[i], lo, hi);
    }

    void grid(const std::string& name, const Grid& g, std::size_t rows, std::size_t cols,
              double lo = 0.0, double hi = HUGE_VAL) {
        if (!shape(name, g, rows, cols)) return;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) value(idx(name, r, c), g(r, c), lo, hi);
    }

private:
    ValidationReport& report_;
};

}  // namespace

ValidationReport validate_instance(const InstanceSpec& s) {
    ValidationReport report;
    Checker check(report);
    const auto I = s.n_plants, J = s.n_warehouses, K = s.n_customers;
    if (I == 0) check.fail("n_plants", "must be positive");
    if (J == 0) check.fail("n_warehouses", "must be positive");
    if (K == 0) check.fail("n_customers", "must be positive");

    check.vec("p_upper", s.p_upper, I);
    check.vec("p_lower", s.p_lower, I);
    if (s.p_upper.size() == I && s.p_lower.size() == I) {
        for (std::size_t i = 0; i < I; ++i) {
            if (s.p_lower[i] > s.p_upper[i]) {
                std::ostringstream os;
                os << "lower production bound " << s.p_lower[i] << " exceeds upper bound " << s.p_upper[i];
                check.fail(idx("p_lower", i), os.str());
            }
        }
    }
    check.grid("q_upper_ij", s.q_upper_ij, I, J);
    check.grid("q_upper_jk", s.q_upper_jk, J, K);
    check.grid("q_lower_ij", s.q_lower_ij, I, J);
    check.grid("q_lower_jk", s.q_lower_jk, J, K);
    check.vec("w_upper", s.w_upper, J);
    check.vec("inventory", s.inventory, J);
    if (check.length("demand", s.demand.size(), K)) {
        for (std::size_t k = 0; k < K; ++k) {
            check.value(idx("demand", k) + ".mu", s.demand[k].mu, 0.0, HUGE_VAL);
            check.value(idx("demand", k) + ".sigma", s.demand[k].sigma, 0.0, HUGE_VAL);
        }
    }
    check.vec("a", s.a, J);
    check.grid("beta", s.beta, J, K, 0.0, 1.0);
    check.grid("gamma", s.gamma, J, K, 0.0, 1.0);
    check.grid("h", s.h, J, K);
    check.value("t_upper", s.t_upper, 0.0, HUGE_VAL);
    check.value("t_lower", s.t_lower, 0.0, HUGE_VAL);
    if (s.t_lower > s.t_upper) check.fail("t_lower", "minimum delivery time exceeds maximum");

    const auto& c = s.costs;
    check.vec("costs.c_prod", c.c_prod, I);
    check.grid("costs.c_var_ij", c.c_var_ij, I, J);
    check.grid("costs.c_fix_ij", c.c_fix_ij, I, J);
    check.grid("costs.c_var_jk", c.c_var_jk, J, K);
    check.grid("costs.c_fix_jk", c.c_fix_jk, J, K);
    check.vec("costs.c_install", c.c_install, J);
    check.grid("costs.c_po", c.c_po, J, K);
    check.grid("costs.c_pu", c.c_pu, J, K);

    if (report.ok()) {
        const double supply = std::accumulate(s.p_upper.begin(), s.p_upper.end(), 0.0);
        const double demand = std::accumulate(s.demand.begin(), s.demand.end(), 0.0,
                                              [](double acc, const DemandSpec& d) { return acc + d.mu; });
        if (supply < demand) {
            std::ostringstream os;
            os << "total plant capacity " << supply << " is below total mean demand " << demand;
            report.warnings.push_back({"p_upper", os.str()});
        }
    }
    return report;
}

std::vector<double> demand_targets(const InstanceSpec& spec, double safety_factor) {
    std::vector<double> out(spec.demand.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = spec.demand[k].mu + safety_factor * spec.demand[k].sigma;
    return out;
}

namespace {

void check_range(const char* name, const Range& r) {
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi)) || r.lo > r.hi || r.lo < 0.0)
        throw InfeasibleRanges(std::string("range ") + name + " must satisfy 0 <= lo <= hi");
}

}  // namespace

InstanceSpec generate_instance(std::uint64_t seed, std::size_t n_plants, std::size_t n_warehouses,
                               std::size_t n_customers, const GenerationRanges& g) {
    if (n_plants == 0 || n_warehouses == 0 || n_customers == 0)
        throw InvalidInstance("instance sizes must be positive");
    for (auto [name, r] : {std::pair{"demand_mu", g.demand_mu}, {"demand_cv", g.demand_cv},
                           {"p_upper", g.p_upper}, {"p_lower_fraction", g.p_lower_fraction},
                           {"q_upper_ij", g.q_upper_ij}, {"q_upper_jk", g.q_upper_jk},
                           {"w_upper", g.w_upper}, {"inventory", g.inventory}, {"a", g.a},
                           {"beta", g.beta}, {"gamma", g.gamma}, {"h", g.h},
                           {"t_lower", g.t_lower}, {"t_upper", g.t_upper}, {"c_prod", g.c_prod},
                           {"c_var_ij", g.c_var_ij}, {"c_fix_ij", g.c_fix_ij},
                           {"c_var_jk", g.c_var_jk}, {"c_fix_jk", g.c_fix_jk},
                           {"c_install", g.c_install}, {"c_po", g.c_po}, {"c_pu", g.c_pu}})
        check_range(name, r);
    if (g.beta.hi > 1.0 || g.gamma.hi > 1.0 || g.p_lower_fraction.hi > 1.0)
        throw InfeasibleRanges("beta, gamma and p_lower_fraction ranges must lie in [0, 1]");
    if (g.t_lower.hi > g.t_upper.lo)
        throw InfeasibleRanges("t_lower range must lie below t_upper range");
    if (g.stocked_fraction < 0.0 || g.stocked_fraction > 1.0)
        throw InfeasibleRanges("stocked_fraction must lie in [0, 1]");

    const auto I = n_plants, J = n_warehouses, K = n_customers;
    // Even the smallest possible demand cannot be met by the largest possible plants.
    const double min_demand = static_cast<double>(K) * g.demand_mu.lo * (1.0 + g.safety_factor * g.demand_cv.lo);
    if (min_demand > static_cast<double>(I) * g.p_upper.hi)
        throw InfeasibleRanges("demand range exceeds the total production capacity range");

    Stream rng(derive_key(seed, hash_name("instance"), I, J, K));
    InstanceSpec s = make_zero_instance(I, J, K);

    for (std::size_t k = 0; k < K; ++k) {
        const double mu = rng.uniform(g.demand_mu.lo, g.demand_mu.hi);
        s.demand[k] = {mu, mu * rng.uniform(g.demand_cv.lo, g.demand_cv.hi)};
    }
    for (std::size_t i = 0; i < I; ++i) {
        s.p_upper[i] = rng.uniform(g.p_upper.lo, g.p_upper.hi);
        s.p_lower[i] = s.p_upper[i] * rng.uniform(g.p_lower_fraction.lo, g.p_lower_fraction.hi);
    }
    for (std::size_t j = 0; j < J; ++j) {
        const bool stocked = rng.uniform() < g.stocked_fraction;
        const double stock = rng.uniform(g.inventory.lo, g.inventory.hi);
        s.inventory[j] = stocked ? stock : 0.0;
        s.w_upper[j] = rng.uniform(g.w_upper.lo, g.w_upper.hi);
        s.a[j] = rng.uniform(g.a.lo, g.a.hi);
        s.costs.c_install[j] = rng.uniform(g.c_install.lo, g.c_install.hi);
    }
    for (std::size_t i = 0; i < I; ++i) {
        s.costs.c_prod[i] = rng.uniform(g.c_prod.lo, g.c_prod.hi);
        for (std::size_t j = 0; j < J; ++j) {
            s.q_upper_ij(i, j) = rng.uniform(g.q_upper_ij.lo, g.q_upper_ij.hi);
            s.costs.c_var_ij(i, j) = rng.uniform(g.c_var_ij.lo, g.c_var_ij.hi);
            s.costs.c_fix_ij(i, j) = rng.uniform(g.c_fix_ij.lo, g.c_fix_ij.hi);
        }
    }
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
            s.q_upper_jk(j, k) = rng.uniform(g.q_upper_jk.lo, g.q_upper_jk.hi);
            s.costs.c_var_jk(j, k) = rng.uniform(g.c_var_jk.lo, g.c_var_jk.hi);
            s.costs.c_fix_jk(j, k) = rng.uniform(g.c_fix_jk.lo, g.c_fix_jk.hi);
            s.costs.c_po(j, k) = rng.uniform(g.c_po.lo, g.c_po.hi);
            s.costs.c_pu(j, k) = rng.uniform(g.c_pu.lo, g.c_pu.hi);
            s.beta(j, k) = rng.uniform(g.beta.lo, g.beta.hi);
            s.gamma(j, k) = rng.uniform(g.gamma.lo, g.gamma.hi);
            s.h(j, k) = rng.uniform(g.h.lo, g.h.hi);
        }
    }
    s.t_lower = rng.uniform(g.t_lower.lo, g.t_lower.hi);
    s.t_upper = rng.uniform(g.t_upper.lo, g.t_upper.hi);

    // Certificate flow: plants cover the demand target in proportion to their
    // spare capacity, every warehouse takes an equal share, and each warehouse
    // ships its inflow plus inventory to customers in proportion to demand.
    const auto target = demand_targets(s, g.safety_factor);
    const double total = std::accumulate(target.begin(), target.end(), 0.0);
    double lower_sum = std::accumulate(s.p_lower.begin(), s.p_lower.end(), 0.0);
    double spare = 0.0;
    for (std::size_t i = 0; i < I; ++i) spare += s.p_upper[i] - s.p_lower[i];
    const double needed = std::max(0.0, total - lower_sum);
    if (needed > spare) {
        // Raise every plant proportionally, capped at the top of the range.
        const double factor = needed / std::max(spare, 1e-300);
        spare = 0.0;
        for (std::size_t i = 0; i < I; ++i) {
            const double room = (s.p_upper[i] - s.p_lower[i]) * factor;
            s.p_upper[i] = std::min(g.p_upper.hi, std::max(s.p_upper[i], s.p_lower[i] + room));
            s.p_lower[i] = std::min(s.p_lower[i], s.p_upper[i]);
            spare += s.p_upper[i] - s.p_lower[i];
        }
        lower_sum = std::accumulate(s.p_lower.begin(), s.p_lower.end(), 0.0);
        if (needed > spare * (1.0 + 1e-12)) {
            // Capped plants left a shortfall; fill plants with headroom to the range top.
            for (std::size_t i = 0; i < I && needed > spare; ++i) {
                const double add = std::min(g.p_upper.hi - s.p_upper[i], needed - spare);
                s.p_upper[i] += add;
                spare += add;
            }
            if (needed > spare * (1.0 + 1e-12))
                throw InfeasibleRanges("p_upper range cannot cover the generated demand");
        }
    }

    std::vector<double> produce(I);
    for (std::size_t i = 0; i < I; ++i) {
        const double room = s.p_upper[i] - s.p_lower[i];
        produce[i] = s.p_lower[i] + (spare > 0.0 ? needed * room / spare : 0.0);
        produce[i] = std::min(produce[i], s.p_upper[i]);
    }
    const double dj = static_cast<double>(J);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
            s.q_upper_ij(i, j) = std::max(s.q_upper_ij(i, j), produce[i] / dj);

    const double supply = std::accumulate(produce.begin(), produce.end(), 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        const double outflow = supply / dj + s.inventory[j];
        s.w_upper[j] = std::max(s.w_upper[j], s.a[j] * outflow);
        for (std::size_t k = 0; k < K; ++k) {
            const double share = total > 0.0 ? target[k] / total : 1.0 / static_cast<double>(K);
            s.q_upper_jk(j, k) = std::max(s.q_upper_jk(j, k), outflow * share);
        }
    }
    return s;
}

}  // namespace scnd
