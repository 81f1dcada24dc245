#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "config.hpp"
#include "experiments.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int exit_code = -1;
  std::string output;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(FMBSIM_PATH) + " " + args + " 2>&1";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe))
    r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fmbsim_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config(const std::string& name, const std::string& body) const {
    const auto path = dir_ / name;
    std::ofstream(path) << body;
    return path.string();
  }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, FdtIdentityDefaultsPass) {
  const auto cfg = config("fdt.json", R"({"experiment": "FdtIdentity", "seed": 1})");
  const auto r = run("run " + cfg + " --output " + out("fdt"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  const auto manifest = nlohmann::json::parse(slurp(out("fdt") + "/manifest.json"));
  EXPECT_TRUE(manifest["passed"].get<bool>());
  EXPECT_LT(manifest["metrics"]["max_relative_error_low_loss"].get<double>(), 1e-12);
  EXPECT_LT(manifest["metrics"]["max_relative_error_high_loss"].get<double>(), 1e-12);
  EXPECT_EQ(manifest["config"]["params"]["points"], 10000);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
}

TEST_F(CliTest, CflViolationExitsThree) {
  const auto cfg = config("cfl.json",
                          R"({"experiment": "Propagation", "params": {"dx": 0.05, "dt": 0.06}})");
  const auto r = run("run " + cfg + " --output " + out("cfl"));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("CFL"), std::string::npos) << r.output;
}

TEST_F(CliTest, SingleThreadedBathDecayIsByteIdentical) {
  const auto cfg = config("bath.json",
                          R"({"experiment": "BathDecay", "seed": 11, "params": {"b0_scale": 1.0, "fit_t0": 10.0}})");
  // Warm bath states exercise the RNG; the decay check itself may fail.
  const auto a = run("run " + cfg + " --threads 1 --output " + out("a"));
  const auto b = run("run " + cfg + " --threads 1 --output " + out("b"));
  ASSERT_TRUE(a.exit_code == 0 || a.exit_code == 1) << a.output;
  EXPECT_EQ(a.exit_code, b.exit_code);
  const auto da = slurp(out("a") + "/trajectory.dat");
  EXPECT_FALSE(da.empty());
  EXPECT_EQ(da, slurp(out("b") + "/trajectory.dat"));

  const auto cold = config("cold.json", R"({"experiment": "BathDecay", "seed": 11})");
  const auto c1 = run("run " + cold + " --threads 1 --output " + out("c1"));
  const auto c2 = run("run " + cold + " --threads 1 --output " + out("c2"));
  EXPECT_EQ(c1.exit_code, 0) << c1.output;
  EXPECT_EQ(slurp(out("c1") + "/trajectory.dat"), slurp(out("c2") + "/trajectory.dat"));
}

TEST_F(CliTest, SeedOverrideChangesWarmBathData) {
  const auto cfg = config("bath.json", R"({"experiment": "BathDecay", "params": {"b0_scale": 1.0, "t_end": 5.0, "fit_t0": 1.0}})");
  run("run " + cfg + " --seed 1 --output " + out("s1"));
  run("run " + cfg + " --seed 2 --output " + out("s2"));
  EXPECT_NE(slurp(out("s1") + "/trajectory.dat"), slurp(out("s2") + "/trajectory.dat"));
  const auto m = nlohmann::json::parse(slurp(out("s2") + "/manifest.json"));
  EXPECT_EQ(m["config"]["seed"], 2);
}

TEST_F(CliTest, ListNamesEveryExperiment) {
  const auto r = run("list");
  EXPECT_EQ(r.exit_code, 0);
  for (const char* name :
       {"Dispersion", "FdtIdentity", "KramersKronig", "Propagation", "EnergyConservation",
        "PotentialEquivalence", "BathDecay", "KernelCheck", "LangevinStationary", "BathVsLangevin",
        "DrivenSusceptibility", "EmissionRate", "Purcell"})
    EXPECT_NE(r.output.find(name), std::string::npos) << name;
}

TEST_F(CliTest, ListMapsEmissionRateToItsRelation) {
  const auto r = run("list --json");
  ASSERT_EQ(r.exit_code, 0);
  const auto doc = nlohmann::json::parse(r.output);
  ASSERT_TRUE(doc.is_array());
  EXPECT_EQ(doc.size(), 13u);
  bool found = false;
  for (const auto& rec : doc) {
    EXPECT_TRUE(rec.contains("name") && rec.contains("description") && rec.contains("validates"));
    if (rec["name"] == "EmissionRate") {
      found = true;
      EXPECT_EQ(rec["validates"], "gamma = 2 pi |mu|^2 S(w_eg) / hbar^2");
    }
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, SchemaViolationsExitTwo) {
  for (const char* body :
       {R"({"experiment": "FdtIdentity", "sede": 1})",
        R"({"experiment": "FdtIdentity", "params": {"pionts": 10}})",
        R"({"experiment": "NoSuchThing"})",
        R"({"experiment": "FdtIdentity", "params": {"points": 10.5}})",
        R"({"experiment": "FdtIdentity", "params": {"hbar": "one"}})",
        R"({"params": {}})",
        R"({"experiment": "FdtIdentity",)"}) {
    const auto cfg = config("bad.json", body);
    const auto r = run("run " + cfg + " --output " + out("bad"));
    EXPECT_EQ(r.exit_code, 2) << body << "\n" << r.output;
  }
  EXPECT_EQ(run("run " + out("missing.json")).exit_code, 2);
}

TEST_F(CliTest, NumericalFailureExitsFour) {
  // A record too short for the source to ring down.
  const auto cfg = config("purcell.json",
                          R"({"experiment": "Purcell", "params": {"cavity_t_end": 200.0}})");
  const auto r = run("run " + cfg + " --output " + out("num"));
  EXPECT_EQ(r.exit_code, 4) << r.output;
}

TEST(Config, ResolvesDefaultsAndEchoesThem) {
  const auto cfg = fmbsim::parse_config(R"({"experiment": "BathDecay", "params": {"eta": 0.04}})");
  EXPECT_DOUBLE_EQ(cfg.params["eta"].get<double>(), 0.04);
  EXPECT_EQ(cfg.params["n_modes"], 2000);
  const auto echo = fmbsim::to_json(cfg);
  EXPECT_EQ(fmbsim::parse_config(echo.dump()).params, cfg.params);
  EXPECT_EQ(fmbsim::config_hash(cfg), fmbsim::config_hash(fmbsim::parse_config(echo.dump())));
}

TEST(Config, HashDistinguishesParams) {
  const auto a = fmbsim::parse_config(R"({"experiment": "BathDecay"})");
  const auto b = fmbsim::parse_config(R"({"experiment": "BathDecay", "params": {"eta": 0.04}})");
  EXPECT_NE(fmbsim::config_hash(a), fmbsim::config_hash(b));
}

TEST(Config, IntegerParamsAcceptedWhereFloatsExpected) {
  const auto cfg = fmbsim::parse_config(R"({"experiment": "BathDecay", "params": {"t_end": 60}})");
  EXPECT_DOUBLE_EQ(cfg.params["t_end"].get<double>(), 60.0);
}

} // namespace
