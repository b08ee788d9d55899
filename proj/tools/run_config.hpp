#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scnd/io.hpp"

namespace scnd::cli {

struct InstanceSource {
    std::optional<std::filesystem::path> path;  // load instead of generating
    std::uint64_t seed = 42;
    std::size_t plants = 5;
    std::size_t warehouses = 5;
    std::size_t customers = 5;
    GenerationRanges ranges;
};

enum class ScaleMode { PerSpec, Fixed, Auto };

struct NoiseSettings {
    std::vector<NoiseSpec> suite = default_noise_suite();
    ScaleMode scale_mode = ScaleMode::Auto;
    double scale = 1.0;  // used with ScaleMode::Fixed
    double calibration_fraction = 0.5;
    std::size_t n = 50;
    double tolerance = 100.0;
    bool include_infeasible = false;
    std::uint64_t seed = 42;
};

struct RunConfig {
    InstanceSource instance;
    SolverConfig solver;
    Stage2Options stage2;
    double safety_factor = 0.0;
    NoiseSettings noise;
    int threads = 0;
    std::filesystem::path output = "scnd-out";
};

/// Reads a config document; absent fields keep their defaults. Unknown keys
/// raise ConfigError so typos do not go unnoticed.
RunConfig parse_run_config(const json& doc);

/// Canonical form of every field that affects results. Thread count and the
/// output directory are left out, so the hash of this document identifies a
/// run's artifacts.
json canonical_json(const RunConfig& cfg);

void validate(const RunConfig& cfg);

RegimeRule parse_rule(const std::string& name);

/// Seed of one noise specification's ensemble.
std::uint64_t noise_seed(const RunConfig& cfg, const NoiseSpec& spec);

EnsembleOptions ensemble_options(const RunConfig& cfg, const NoiseSpec& spec);

}  // namespace scnd::cli
