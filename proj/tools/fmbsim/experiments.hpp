#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace fmbsim {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool less_than = true; ///< pass iff value < threshold (else value > threshold)
  bool passed() const { return less_than ? value < threshold : value > threshold; }
};

class RunContext;

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string validates; ///< relation the experiment checks
  nlohmann::json defaults;
  std::function<void(const nlohmann::json& params, RunContext& ctx)> run;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo* find_experiment(const std::string& name);

struct RunResult {
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<std::string> files;
  bool passed() const;
};

class RunContext {
public:
  RunContext(const ExperimentConfig& cfg, RunResult& result);

  std::uint64_t seed() const { return cfg_.seed; }
  void metric(const std::string& name, const nlohmann::json& value);
  void check_below(const std::string& name, double value, double threshold);
  void check_above(const std::string& name, double value, double threshold);
  /// Opens output_dir/file for writing and records it in the manifest.
  std::ofstream open(const std::string& file);

private:
  const ExperimentConfig& cfg_;
  RunResult& result_;
};

/// Runs the configured experiment and writes its data files. Library
/// exceptions propagate.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Writes output_dir/manifest.json.
void write_manifest(const ExperimentConfig& cfg, const RunResult& result, double wall_seconds);

} // namespace fmbsim
