#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scnd/error.hpp"
#include "scnd/model.hpp"
#include "scnd/rng.hpp"
#include "scnd/stage1.hpp"

namespace scnd {

enum class NoiseFamily { Gaussian, Lognormal, Pareto };

const char* to_string(NoiseFamily f);
NoiseFamily parse_noise_family(const std::string& name);

/// Distribution of the additive noise eta.
///
///   Gaussian:  eta = scale * N(0, gaussian_sigma^2)
///   Lognormal: eta = scale * exp(N(lognormal_mu, lognormal_sigma^2))
///   Pareto:    eta = scale * pareto_xm * U^(-1/pareto_alpha), U uniform on (0, 1]
///
/// When `signed_noise` is set the draw is multiplied by an independent +-1.
/// `log_scale`, when present, replaces `scale` by exp(log_scale); it lets a
/// calibrated scale go below the smallest positive double, which heavy Pareto
/// tails need.
struct NoiseSpec {
    std::string label;
    NoiseFamily family = NoiseFamily::Gaussian;
    double scale = 1.0;
    std::optional<double> log_scale;
    double gaussian_sigma = 1.0;
    double lognormal_mu = 0.0;
    double lognormal_sigma = 1.0;
    double pareto_alpha = 1.0;
    double pareto_xm = 1.0;
    bool signed_noise = true;

    /// Natural log of the effective scale (-inf for a zero scale).
    double effective_log_scale() const;
};

/// Throws ConfigError when a parameter is out of its domain.
void validate(const NoiseSpec& spec);

/// x_m * u^(-1/alpha), evaluated in log space; +inf once it overflows.
double pareto_quantile(double u, double alpha, double xm);

/// One draw of eta.
double sample_noise(const NoiseSpec& spec, Stream& stream);

/// The six-member suite of the study: Gaussian, Lognormal and Pareto with
/// alpha in {0.01, 0.05, 0.5, 0.99}, all with unit scale.
std::vector<NoiseSpec> default_noise_suite();

/// A stage-1 solution whose production and flow values carry noise. Binaries
/// and warehouse sizes are those of the unperturbed solution.
struct PerturbedSolution : Stage1Solution {
    std::size_t draws = 0;
};

/// Stream key of one noisy cell; any cell is replayable from these four values.
std::uint64_t cell_key(std::uint64_t seed, std::size_t e, std::size_t e_inner, const std::string& variable);

/// Adds an independent draw to every production and flow value.
PerturbedSolution perturb(const Stage1Solution& sol, const NoiseSpec& noise, std::uint64_t seed, std::size_t e,
                          std::size_t e_inner);

struct RowViolation {
    std::string row;  // e.g. "production_upper(0)" or "plant_arc_capacity(1,2)"
    double residual = 0.0;
};

struct FeasibilityReport {
    bool feasible = true;
    double max_violation = 0.0;
    std::vector<RowViolation> violations;  // rows whose residual exceeds the tolerance
};

/// Evaluates production bounds, flow nonnegativity, both balances, demand
/// cover, arc capacities, warehouse sizing and warehouse capacity on the
/// perturbed values.
FeasibilityReport check_feasibility(const Stage1Solution& pert, const InstanceSpec& spec, double tol,
                                    double safety_factor = 0.0);

enum class VariableGroup { P, Qij, Qjk };

const char* to_string(VariableGroup g);

struct GroupRms {
    bool defined = false;   // false with fewer than two contributing replicates
    bool negative = false;  // pairwise-product sum below zero
    double radicand = 0.0;
    double value = 0.0;     // NaN when negative or undefined
};

struct EnsembleOptions {
    std::size_t n = 50;  // outer replicates; each has n inner repetitions
    std::uint64_t seed = 0;
    /// Absolute tolerance, in product units, for a perturbed row to count as satisfied.
    double feasibility_tolerance = 100.0;
    double safety_factor = 0.0;
    /// Let infeasible replicates contribute to means and RMS.
    bool include_infeasible = false;
    /// OpenMP thread count; 0 uses the runtime default.
    int threads = 0;
};

/// Replicates, flags and aggregates of one noise specification.
///
/// Cells are ordered P(i), then Qij(i,j) row-major, then Qjk(j,k) row-major.
struct NoiseEnsemble {
    NoiseSpec noise;
    std::size_t n = 0;
    std::size_t n_plants = 0;
    std::size_t n_warehouses = 0;
    std::size_t n_customers = 0;
    std::vector<double> values;          // [e][e'][cell]
    std::vector<double> means;           // [e][cell], average over e'
    std::vector<std::uint8_t> feasible;  // [e], all inner repetitions feasible
    std::vector<double> max_violation;   // [e]
    std::size_t feasible_count = 0;
    bool include_infeasible = false;
    std::vector<double> cell_mean;  // [cell], over contributing replicates
    GroupRms rms[3];

    std::size_t cells() const noexcept { return n_plants + n_warehouses * (n_plants + n_customers); }
    std::size_t group_offset(VariableGroup g) const noexcept;
    std::size_t group_size(VariableGroup g) const noexcept;
    double value(std::size_t e, std::size_t e_inner, std::size_t cell) const {
        return values[(e * n + e_inner) * cells() + cell];
    }
    double mean(std::size_t e, std::size_t cell) const { return means[e * cells() + cell]; }
    std::size_t contributing() const noexcept { return include_infeasible ? n : feasible_count; }

    bool operator==(const NoiseEnsemble&) const;
};

/// Raised when fewer than two replicates contribute; carries the ensemble so
/// callers can still report it.
class TooFewFeasible : public Error {
public:
    explicit TooFewFeasible(std::shared_ptr<const NoiseEnsemble> ensemble);
    const NoiseEnsemble& ensemble() const noexcept { return *ensemble_; }
    std::shared_ptr<const NoiseEnsemble> shared() const noexcept { return ensemble_; }

private:
    std::shared_ptr<const NoiseEnsemble> ensemble_;
};

/// Mean of one row of replicates. Summed relative to the row minimum so a
/// constant row returns its value exactly and the result never falls below
/// the smallest entry.
double ensemble_mean(std::span<const double> row);

/// sqrt of the mean pairwise product over all unordered pairs of `means`.
/// Throws NegativeRadicand when that mean is negative, SingleCell with fewer
/// than two entries.
double ensemble_rms(std::span<const double> means);

/// Fills means, feasible_count, cell_mean and rms from values and feasible.
/// Exposed so hand-built replicate tables can be checked.
void summarize(NoiseEnsemble& ens);

/// Runs the n x n double loop, replicates in parallel. Throws TooFewFeasible.
NoiseEnsemble run_ensemble(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                           const EnsembleOptions& options);

/// Single-threaded reference built on `perturb` and `check_feasibility`.
NoiseEnsemble run_ensemble_serial(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                                  const EnsembleOptions& options);

/// Number of feasible outer replicates, without storing any values.
std::size_t count_feasible(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                           const EnsembleOptions& options);

/// Largest scale (to ~0.1% in log terms) at which at least
/// ceil(target_fraction * n) outer replicates stay feasible under the same
/// draws. Returns `noise` with `log_scale` set.
NoiseSpec calibrate_scale(const InstanceSpec& spec, const Stage1Solution& sol, const NoiseSpec& noise,
                          const EnsembleOptions& options, double target_fraction = 0.5);

}  // namespace scnd
