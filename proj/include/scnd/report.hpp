#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "scnd/stage2.hpp"
#include "scnd/stochastic.hpp"

namespace scnd {

/// Deterministic value minus ensemble mean, cell by cell, for one variable group.
/// P is laid out as a plants x 1 column.
struct DiffMatrix {
    VariableGroup group = VariableGroup::Qij;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    bool operator==(const DiffMatrix&) const = default;
};

struct DeviationRow {
    std::string label;
    double sigma = 0.0;
    std::size_t feasible = 0;
    std::size_t n = 0;

    bool operator==(const DeviationRow&) const = default;
};

/// Standard deviation of the flattened Qij difference per noise specification.
struct DeviationTable {
    std::vector<DeviationRow> rows;

    bool operator==(const DeviationTable&) const = default;
};

/// Throws ConfigError when no replicate contributes to the ensemble mean.
DiffMatrix diff_matrix(const Stage1Solution& det, const NoiseEnsemble& ens, VariableGroup group);

/// Sample standard deviation (divisor n - 1). Throws SingleCell below two values.
double sample_std(std::span<const double> values);

DeviationTable deviation_table(const Stage1Solution& det, std::span<const NoiseEnsemble> ensembles);

// CSV: comma separated, '\n' line ends, header row first, 17 significant digits.
void write_csv(std::ostream& os, const DiffMatrix& m);
void write_csv(std::ostream& os, const DeviationTable& t);
void write_csv(std::ostream& os, const Stage2Report& r);

/// Throws IoFailure on malformed text.
DiffMatrix parse_diff_csv(std::istream& is, VariableGroup group);
DeviationTable parse_deviation_csv(std::istream& is);

/// Writes through a temporary stream into `path`; IoFailure names the cause.
void export_csv(const DiffMatrix& m, const std::filesystem::path& path);
void export_csv(const DeviationTable& t, const std::filesystem::path& path);
void export_csv(const Stage2Report& r, const std::filesystem::path& path);

/// Per plant: deterministic production and the ensemble mean of each noise run.
void write_production_series(std::ostream& os, const Stage1Solution& det, std::span<const NoiseEnsemble> ensembles);

/// A matplotlib script that renders the emitted CSV files as heatmaps and bars.
void write_plot_script(std::ostream& os, const std::vector<std::string>& labels);

/// Binary tensor: "SCNDTEN1", u64 rank, u64 dims[rank], then little-endian
/// f64 values in row-major order.
void write_tensor(std::ostream& os, std::span<const std::uint64_t> dims, std::span<const double> values);
void write_tensor(const std::filesystem::path& path, std::span<const std::uint64_t> dims,
                  std::span<const double> values);

struct Tensor {
    std::vector<std::uint64_t> dims;
    std::vector<double> values;
};

Tensor read_tensor(std::istream& is);

}  // namespace scnd
