#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "scnd/model.hpp"
#include "scnd/stage1.hpp"
#include "scnd/stage2.hpp"
#include "scnd/stochastic.hpp"

namespace scnd {

using json = nlohmann::ordered_json;

// Conversions throw ConfigError naming the offending field when a document
// does not have the expected shape.

json to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const json& doc);

json to_json(const Stage1Solution& sol);
Stage1Solution stage1_from_json(const json& doc);

json to_json(const Stage2Report& report);

json to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const json& doc);

/// Flags, counters, RMS and cell means of an ensemble; no replicate values.
json summary_json(const NoiseEnsemble& ens);

/// Rebuilds the summary fields of an ensemble; replicate values stay empty.
NoiseEnsemble ensemble_from_summary(const json& doc);

/// Reads and parses a JSON file; IoFailure when it cannot be read, ConfigError
/// when it is not JSON.
json load_json(const std::filesystem::path& path);

/// Writes `doc` indented by two spaces with a trailing newline.
void save_json(const std::filesystem::path& path, const json& doc);

/// FNV-1a 64 of a byte string, as 16 lowercase hex digits.
std::string fnv_hex(std::string_view bytes);

/// FNV-1a 64 of a file's contents.
std::string file_hash(const std::filesystem::path& path);

}  // namespace scnd
