#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace fmbsim {

/// Malformed or schema-violating configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object(); ///< fully resolved, defaults filled in
  std::uint64_t seed = 0;
  int threads = 0; ///< 0 = OpenMP default
  std::string output_dir = "fmbsim_out";
};

/// Parses and resolves a config document:
///   {"experiment": name, "seed": int, "threads": int, "output_dir": str, "params": {...}}
/// Only "experiment" is required. Keys outside the schema, unknown
/// experiments, unknown params and type mismatches throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON echo of a resolved config.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace fmbsim
