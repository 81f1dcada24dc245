#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "experiments.hpp"

namespace fmbsim {

namespace {

using nlohmann::json;

bool same_kind(const json& expected, const json& got) {
  if (expected.is_number())
    return got.is_number() && (expected.is_number_float() || !got.is_number_float());
  if (expected.is_array()) {
    if (!got.is_array())
      return false;
    if (expected.empty())
      return true;
    for (const auto& v : got)
      if (!same_kind(expected.front(), v))
        return false;
    return true;
  }
  return expected.type() == got.type();
}

json resolve_params(const ExperimentInfo& info, const json& given) {
  if (!given.is_object())
    throw ConfigError("\"params\" must be an object");
  json out = info.defaults;
  for (const auto& [key, value] : given.items()) {
    if (!out.contains(key))
      throw ConfigError("unknown parameter \"" + key + "\" for experiment " + info.name);
    if (!same_kind(out[key], value))
      throw ConfigError("parameter \"" + key + "\" has the wrong type (expected " +
                        std::string(out[key].type_name()) + ")");
    out[key] = value;
  }
  return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (key != "experiment" && key != "seed" && key != "threads" && key != "output_dir" &&
        key != "params")
      throw ConfigError("unknown config key \"" + key + "\"");
  if (!doc.contains("experiment") || !doc["experiment"].is_string())
    throw ConfigError("config needs a string \"experiment\"");

  ExperimentConfig cfg;
  cfg.experiment = doc["experiment"].get<std::string>();
  const auto* info = find_experiment(cfg.experiment);
  if (!info)
    throw ConfigError("unknown experiment \"" + cfg.experiment + "\" (see `fmbsim list`)");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ConfigError("\"seed\" must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_integer() || doc["threads"].get<long long>() < 0)
      throw ConfigError("\"threads\" must be an integer >= 0");
    cfg.threads = doc["threads"].get<int>();
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string())
      throw ConfigError("\"output_dir\" must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  cfg.params = resolve_params(*info, doc.value("params", json::object()));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  return {{"experiment", cfg.experiment},
          {"seed", cfg.seed},
          {"threads", cfg.threads},
          {"output_dir", cfg.output_dir},
          {"params", cfg.params}};
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace fmbsim
