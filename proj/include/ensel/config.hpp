#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "ensel/harness.hpp"
#include "ensel/synthetic.hpp"

namespace ensel {

/// Declarative description of one `select` run. Every object rejects keys it
/// does not know; errors are config_error with a dotted path to the field.
struct RunConfig {
  std::optional<std::string> csv_path;  // as written in the file
  std::optional<SyntheticPoolSpec> synthetic;
  ExperimentConfig experiment;
  bool split_seed_explicit = false;
  std::string output_dir = "out";

  /// Replaces the master seed (and the split seed unless it was explicit).
  void override_seed(std::uint64_t seed);
};

nlohmann::json load_json_file(const std::filesystem::path& path);

SyntheticPoolSpec parse_synthetic_spec(const nlohmann::json& j, const std::string& where = "");
RunConfig parse_run_config(const nlohmann::json& j);

nlohmann::ordered_json to_json(const SyntheticPoolSpec& spec);
/// Resolved configuration echo, as embedded in the report.
nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace ensel
