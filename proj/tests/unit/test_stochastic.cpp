#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "scnd/stochastic.hpp"

using namespace scnd;

namespace {

struct Solved {
    InstanceSpec spec;
    Stage1Solution sol;
};

const Solved& solved(std::size_t n) {
    static std::map<std::size_t, Solved> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        Solved s;
        s.spec = generate_instance(42, n, n, n);
        s.sol = *solve_stage1(s.spec, SolverConfig{}).solution;
        it = cache.emplace(n, std::move(s)).first;
    }
    return it->second;
}

NoiseSpec pareto(double alpha, bool signed_noise, double scale = 1.0) {
    NoiseSpec s;
    s.label = "pareto";
    s.family = NoiseFamily::Pareto;
    s.pareto_alpha = alpha;
    s.signed_noise = signed_noise;
    s.scale = scale;
    return s;
}

}  // namespace

TEST_CASE("zero scale yields zero noise for every family") {
    for (auto s : default_noise_suite()) {
        s.scale = 0.0;
        Stream st(7);
        for (int i = 0; i < 1000; ++i) CHECK(sample_noise(s, st) == 0.0);
    }
}

TEST_CASE("Pareto inverse CDF") {
    CHECK(std::abs(pareto_quantile(0.25, 0.5, 1.0) - 16.0) <= 1e-12);
    // Cross-check by inverting the CDF F(x) = 1 - (xm/x)^alpha numerically.
    for (double u : {0.1, 0.25, 0.5, 0.9}) {
        const double alpha = 0.7, xm = 2.0;
        double lo = xm, hi = 1e12;
        for (int it = 0; it < 400; ++it) {
            const double mid = std::sqrt(lo * hi);
            // Survival at the quantile of U is u itself: (xm/x)^alpha = u.
            if (std::pow(xm / mid, alpha) > u) lo = mid;
            else hi = mid;
        }
        CHECK(pareto_quantile(u, alpha, xm) == doctest::Approx(lo).epsilon(1e-12));
    }
    CHECK(std::isinf(pareto_quantile(1e-10, 0.01, 1.0)));
}

TEST_CASE("unsigned Pareto draws sit above scale times xm") {
    auto s = pareto(0.5, false, 3.0);
    s.pareto_xm = 2.0;
    Stream st(1);
    for (int i = 0; i < 10000; ++i) CHECK(sample_noise(s, st) >= 6.0);
}

TEST_CASE("Gaussian sample mean obeys the CLT bound") {
    NoiseSpec s;
    Stream st(derive_key(2024, hash_name("gaussian")));
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_noise(s, st);
    CHECK(std::abs(sum / n) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("log scale and plain scale agree") {
    for (auto s : default_noise_suite()) {
        auto plain = s;
        plain.scale = 2.5;
        auto logged = s;
        logged.log_scale = std::log(2.5);
        Stream a(9), b(9);
        for (int i = 0; i < 200; ++i) {
            const double x = sample_noise(plain, a), y = sample_noise(logged, b);
            if (std::isfinite(x)) CHECK(y == doctest::Approx(x).epsilon(1e-12));
        }
    }
}

TEST_CASE("noise specs are validated") {
    auto s = pareto(0.0, true);
    CHECK_THROWS_AS(validate(s), ConfigError);
    s = pareto(1.0, true, -1.0);
    CHECK_THROWS_AS(validate(s), ConfigError);
    CHECK_THROWS_AS(parse_noise_family("cauchy"), ConfigError);
    CHECK(parse_noise_family("lognormal") == NoiseFamily::Lognormal);
}

TEST_CASE("perturbation identity, replay and draw count") {
    const auto spec = generate_instance(1, 2, 2, 2);
    const auto sol = *solve_stage1(spec, SolverConfig{}).solution;
    NoiseSpec g;
    const auto a = perturb(sol, g, 5, 1, 2);
    const auto b = perturb(sol, g, 5, 1, 2);
    CHECK(static_cast<const Stage1Solution&>(a) == static_cast<const Stage1Solution&>(b));
    CHECK(a.draws == 10);
    CHECK(a.y == sol.y);
    CHECK(a.w == sol.w);

    // Any single cell can be replayed in isolation.
    Stream cell(cell_key(5, 1, 2, "Qjk(1,0)"));
    CHECK(a.q_jk(1, 0) == sol.q_jk(1, 0) + sample_noise(g, cell));

    g.scale = 0.0;
    const auto z = perturb(sol, g, 5, 1, 2);
    CHECK(static_cast<const Stage1Solution&>(z) == sol);
}

TEST_CASE("feasibility of the unperturbed solution") {
    const auto& s = solved(3);
    const auto rep = check_feasibility(s.sol, s.spec, 1e-6);
    CHECK(rep.feasible);
    CHECK(rep.violations.empty());
}

TEST_CASE("single production bound breach is named") {
    const auto& s = solved(3);
    auto pert = s.sol;
    pert.p[0] = s.spec.p_upper[0] + 50.0;
    // Keep the plant balanced so only the bound fails.
    pert.q_ij(0, 0) += pert.p[0] - s.sol.p[0];
    pert.q_jk(0, 0) += pert.p[0] - s.sol.p[0];
    pert.x_ij[0] = 1;
    pert.x_jk[0] = 1;
    auto spec = s.spec;
    spec.q_upper_ij(0, 0) = spec.q_upper_jk(0, 0) = 1e9;
    pert.w[0] = 1e9;
    spec.w_upper[0] = 1e9;
    pert.y[0] = 1;
    const auto rep = check_feasibility(pert, spec, 1e-6);
    REQUIRE_FALSE(rep.feasible);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].row == "production_upper(0)");
    CHECK(rep.violations[0].residual == doctest::Approx(50.0));
}

TEST_CASE("heavy Pareto noise breaks feasibility") {
    const auto& s = solved(5);
    EnsembleOptions o;
    o.n = 100;
    o.seed = 3;
    o.feasibility_tolerance = 1e-6;
    const auto count = count_feasible(s.spec, s.sol, pareto(0.01, true), o);
    CHECK(count < 100);
}

TEST_CASE("replicate row mean") {
    const double one[] = {4.0};
    CHECK(ensemble_mean(one) == 4.0);
    const double three[] = {1.0, 2.0, 3.0};
    CHECK(ensemble_mean(three) == 2.0);
    const double same[] = {0.1, 0.1, 0.1};
    CHECK(ensemble_mean(same) == 0.1);
    Stream st(4);
    std::vector<double> row(10);
    for (auto& v : row) v = st.uniform(-1e3, 1e3);
    // Two-pass oracle: plain mean, then the mean of the residuals as a correction.
    double m = 0.0;
    for (double v : row) m += v;
    m /= 10.0;
    double corr = 0.0;
    for (double v : row) corr += v - m;
    m += corr / 10.0;
    CHECK(std::abs(ensemble_mean(row) - m) <= 1e-12 * std::abs(m));
}

TEST_CASE("pairwise-product RMS") {
    const double two[] = {2.0, 8.0};
    CHECK(ensemble_rms(two) == 4.0);
    const double three[] = {1.0, 2.0, 3.0};
    CHECK(ensemble_rms(three) == doctest::Approx(std::sqrt(11.0 / 3.0)).epsilon(1e-15));
    const double constant[] = {-3.5, -3.5, -3.5, -3.5};
    CHECK(ensemble_rms(constant) == 3.5);
    const double neg[] = {1.0, -2.0};
    try {
        ensemble_rms(neg);
        FAIL("expected NegativeRadicand");
    } catch (const NegativeRadicand& e) {
        CHECK(e.radicand() == -2.0);
    }
    const double single[] = {1.0};
    CHECK_THROWS_AS(ensemble_rms(single), SingleCell);
}

TEST_CASE("hand-built 3x3 replicate table") {
    NoiseEnsemble ens;
    ens.n = 3;
    ens.n_plants = 1;
    ens.n_warehouses = 0;
    ens.n_customers = 0;
    // One cell; X[e][e'].
    ens.values = {1.0, 2.0, 3.0,  //
                  4.0, 4.0, 7.0,  //
                  -3.0, 0.0, 6.0};
    ens.feasible = {1, 1, 0};
    summarize(ens);
    CHECK(ens.means == std::vector<double>{2.0, 5.0, 1.0});
    CHECK(ens.feasible_count == 2);
    CHECK(ens.cell_mean[0] == 3.5);
    CHECK(ens.rms[0].defined);
    CHECK(ens.rms[0].value == std::sqrt(10.0));

    ens.include_infeasible = true;
    summarize(ens);
    CHECK(ens.cell_mean[0] == doctest::Approx(8.0 / 3.0));
    CHECK(ens.rms[0].value == doctest::Approx(std::sqrt((10.0 + 2.0 + 5.0) / 3.0)));
}

TEST_CASE("noiseless ensemble reproduces the solution") {
    const auto& s = solved(3);
    NoiseSpec g;
    g.scale = 0.0;
    EnsembleOptions o;
    o.n = 5;
    const auto ens = run_ensemble(s.spec, s.sol, g, o);
    CHECK(ens.feasible_count == 5);
    const std::size_t I = 3, J = 3;
    for (std::size_t i = 0; i < I; ++i) CHECK(ens.cell_mean[i] == s.sol.p[i]);
    for (std::size_t c = 0; c < I * J; ++c) CHECK(ens.cell_mean[I + c] == s.sol.q_ij.flat()[c]);
    for (std::size_t c = 0; c < J * 3; ++c) CHECK(ens.cell_mean[I + I * J + c] == s.sol.q_jk.flat()[c]);
}

TEST_CASE("parallel and serial ensembles are identical") {
    const auto& s = solved(3);
    EnsembleOptions o;
    o.n = 8;
    o.seed = 77;
    for (auto noise : default_noise_suite()) {
        CAPTURE(noise.label);
        noise = calibrate_scale(s.spec, s.sol, noise, o);
        o.threads = 1;
        const auto one = run_ensemble(s.spec, s.sol, noise, o);
        o.threads = 4;
        const auto many = run_ensemble(s.spec, s.sol, noise, o);
        const auto serial = run_ensemble_serial(s.spec, s.sol, noise, o);
        CHECK(one == many);
        CHECK(one == serial);
        CHECK(one.feasible_count >= 4);
    }
}

TEST_CASE("single replicate cannot define RMS") {
    const auto& s = solved(2);
    NoiseSpec g;
    EnsembleOptions o;
    o.n = 1;
    try {
        run_ensemble(s.spec, s.sol, g, o);
        FAIL("expected TooFewFeasible");
    } catch (const TooFewFeasible& e) {
        CHECK(e.ensemble().n == 1);
        CHECK_FALSE(e.ensemble().rms[1].defined);
    }
    o.n = 0;
    CHECK_THROWS_AS(run_ensemble(s.spec, s.sol, g, o), ConfigError);
}

TEST_CASE("unsigned Pareto only raises flows") {
    const auto& s = solved(4);
    EnsembleOptions o;
    o.n = 10;
    o.seed = 8;
    for (double alpha : {0.05, 0.5, 0.99}) {
        const auto noise = calibrate_scale(s.spec, s.sol, pareto(alpha, false), o);
        const auto ens = run_ensemble(s.spec, s.sol, noise, o);
        for (std::size_t c = 0; c < ens.cells(); ++c) {
            const double det = c < 4 ? s.sol.p[c] : c < 20 ? s.sol.q_ij.flat()[c - 4] : s.sol.q_jk.flat()[c - 20];
            CHECK(det - ens.cell_mean[c] <= 0.0);
        }
    }
}

TEST_CASE("calibrated scale sits on the feasibility boundary") {
    const auto& s = solved(3);
    EnsembleOptions o;
    o.n = 12;
    const auto noise = calibrate_scale(s.spec, s.sol, default_noise_suite()[0], o);
    REQUIRE(noise.log_scale);
    CHECK(count_feasible(s.spec, s.sol, noise, o) >= 6);
    auto louder = noise;
    louder.log_scale = *noise.log_scale + 2e-3;
    CHECK(count_feasible(s.spec, s.sol, louder, o) < 6);
}
