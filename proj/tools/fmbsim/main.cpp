#include <chrono>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "fmb/errors.hpp"

namespace {

enum Exit : int { kPass = 0, kCheckFailed = 1, kConfig = 2, kValidation = 3, kNumerical = 4 };

int cmd_list(bool as_json) {
  const auto& reg = fmbsim::experiments();
  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : reg)
      out.push_back({{"name", e.name},
                     {"description", e.description},
                     {"validates", e.validates},
                     {"defaults", e.defaults}});
    std::cout << out.dump(2) << '\n';
    return kPass;
  }
  for (const auto& e : reg)
    std::cout << e.name << "\n  " << e.description << "\n  validates: " << e.validates << '\n';
  return kPass;
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed,
            const std::optional<int>& threads, const std::optional<std::string>& output) {
  fmbsim::ExperimentConfig cfg;
  try {
    cfg = fmbsim::load_config(path);
  } catch (const fmbsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  }
  if (seed)
    cfg.seed = *seed;
  if (threads)
    cfg.threads = *threads;
  if (output)
    cfg.output_dir = *output;

  const auto t0 = std::chrono::steady_clock::now();
  fmbsim::RunResult result;
  try {
    result = fmbsim::run_experiment(cfg);
  } catch (const fmbsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fmb::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const fmb::PoleError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const fmb::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fmbsim::write_manifest(cfg, result, wall);

  for (const auto& c : result.checks)
    std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << " = " << c.value
              << (c.less_than ? " < " : " > ") << c.threshold << '\n';
  std::cout << cfg.experiment << ": " << (result.passed() ? "passed" : "failed") << " in " << wall
            << " s, output in " << cfg.output_dir << '\n';
  return result.passed() ? kPass : kCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"fmbsim: fluctuating-medium benchmark experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
  run->add_option("--output", output, "Output directory");

  auto* list = app.add_subcommand("list", "List experiments and the relation each validates");
  bool as_json = false;
  list->add_flag("--json", as_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kConfig;
  }
  try {
    if (*list)
      return cmd_list(as_json);
    return cmd_run(config_path, seed, threads, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
