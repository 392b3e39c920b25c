#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "uzawa/config.hpp"
#include "uzawa/scenario.hpp"

using namespace uzawa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uzawa_scenario_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string report_value(const std::string& report, const std::string& key) {
  const auto pos = report.find("\n" + key + " = ");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 4;
  return report.substr(start, report.find('\n', start) - start);
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(UZAWA_LAB_PATH) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kScenarios = UZAWA_SCENARIO_DIR;

}  // namespace

TEST(RunSubcommand, VerdictOnHarrodCes) {
  const auto cfg = parse_config(kScenarios + "/harrod_ces.cfg");
  const auto dir = scratch("verdict");
  std::ostringstream log;
  ASSERT_EQ(run_subcommand("verdict", cfg, dir, log), kExitOk) << log.str();
  const auto report = slurp(dir / "verdict_report.txt");
  EXPECT_EQ(report_value(report, "verdict"), "BGP");
  EXPECT_NEAR(std::stod(report_value(report, "g_hat")), 0.03, 1e-4);
  // Reproducibility header carries the resolved config.
  EXPECT_NE(report.find("[config]\n[production]\nfamily = ces"), std::string::npos);
  EXPECT_NE(report.find("t_end = 600"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}

TEST(RunSubcommand, VerdictOnHicksCesIsConsistentNoBgp) {
  const auto cfg = parse_config(kScenarios + "/hicks_ces.cfg");
  const auto dir = scratch("verdict_hicks");
  std::ostringstream log;
  EXPECT_EQ(run_subcommand("verdict", cfg, dir, log), kExitOk) << log.str();
  EXPECT_EQ(report_value(slurp(dir / "verdict_report.txt"), "verdict"), "NoBGP");
}

TEST(RunSubcommand, BrokenMarginalProductsExitTwo) {
  auto cfg = parse_config(kScenarios + "/harrod_ces.cfg");
  cfg.technology_override = ProductionFunction::custom(
      [](double K, double L) { return std::pow(K, 0.3) * std::pow(L, 0.7); }, TechBias::harrod(0.02),
      [](double K, double L) {
        const double F = std::pow(K, 0.3) * std::pow(L, 0.7);
        return std::array<double, 2>{0.45 * F / K, 0.7 * F / L};
      },
      "broken_gradient");
  const auto dir = scratch("broken");
  std::ostringstream log;
  EXPECT_EQ(run_subcommand("verdict", cfg, dir, log), kExitTheoremViolated);
  EXPECT_NE(log.str().find("VIOLATED"), std::string::npos);
  EXPECT_EQ(report_value(slurp(dir / "verdict_report.txt"), "consistent"), "false");
  EXPECT_EQ(run_subcommand("simulate", cfg, dir, log), kExitTheoremViolated);
}

TEST(RunSubcommand, ClassifyWritesTwelveRows) {
  const auto cfg = parse_config(kScenarios + "/harrod_ces.cfg");
  const auto dir = scratch("classify");
  std::ostringstream log;
  ASSERT_EQ(run_subcommand("classify", cfg, dir, log), kExitOk) << log.str();
  std::ifstream in(dir / "classify.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "family,bias,rate,verdict,expected,g_hat,rho_effective,max_drift,horizon,consistent");
  int rows = 0, bgp = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",BGP,") != std::string::npos) ++bgp;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "true") << line;
  }
  EXPECT_EQ(rows, 12);
  EXPECT_EQ(bgp, 8);  // 4 Cobb-Douglas + None/Harrod for each CES
}

TEST(RunSubcommand, SimulateIsByteDeterministic) {
  const auto cfg = parse_config(kScenarios + "/harrod_ces.cfg");
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  std::ostringstream log;
  ASSERT_EQ(run_subcommand("simulate", cfg, a, log), kExitOk);
  ASSERT_EQ(run_subcommand("simulate", cfg, b, log), kExitOk);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  EXPECT_EQ(slurp(a / "simulate_report.txt"), slurp(b / "simulate_report.txt"));
}

TEST(RunSubcommand, PdeWritesGridComparisonAndTable) {
  const auto cfg = parse_config(kScenarios + "/pde.cfg");
  const auto dir = scratch("pde");
  std::ostringstream log;
  ASSERT_EQ(run_subcommand("pde", cfg, dir, log), kExitOk) << log.str();
  EXPECT_TRUE(fs::exists(dir / "pde_upwind.csv"));
  const auto cmp = slurp(dir / "pde_comparison.csv");
  EXPECT_EQ(cmp.rfind("L,t,upwind,characteristics,abs_error\n", 0), 0u);
  EXPECT_EQ(std::count(cmp.begin(), cmp.end(), '\n'), 257);
  const auto report = slurp(dir / "pde_report.txt");
  EXPECT_NE(report.find("level_3 = nL=512"), std::string::npos);
  EXPECT_NE(report.find("order="), std::string::npos);
}

TEST(RunSubcommand, PdeKernelProfile) {
  auto cfg = parse_config(kScenarios + "/pde.cfg");
  cfg.pde.profile = "kernel";
  std::ostringstream log;
  EXPECT_EQ(run_subcommand("pde", cfg, scratch("pde_kernel"), log), kExitOk) << log.str();
}

TEST(RunSubcommand, TimescaleReport) {
  const auto cfg = parse_config(kScenarios + "/cobb_douglas_timescale.cfg");
  const auto dir = scratch("timescale");
  std::ostringstream log;
  ASSERT_EQ(run_subcommand("timescale", cfg, dir, log), kExitOk) << log.str();
  const auto report = slurp(dir / "timescale_report.txt");
  EXPECT_NEAR(std::stod(report_value(report, "lambda_hat")), 0.016, 0.05 * 0.016);
  EXPECT_GE(std::stod(report_value(report, "time_to_0.01")), 60.0);
  EXPECT_EQ(slurp(dir / "time_to_fraction.csv").rfind("fraction,time\n", 0), 0u);
}

TEST(RunSubcommand, OperationalErrorsExitOne) {
  auto cfg = parse_config(kScenarios + "/harrod_ces.cfg");
  std::ostringstream log;
  EXPECT_EQ(run_subcommand("frobnicate", cfg, scratch("unknown"), log), kExitError);
  cfg.run.t_end = 10.0;  // tail window too short
  cfg.run.dt = 1.0;
  EXPECT_EQ(run_subcommand("verdict", cfg, scratch("short"), log), kExitError);
  EXPECT_NE(log.str().find("tail window"), std::string::npos);
}

TEST(Cli, EndToEndExitCodes) {
  const auto dir = scratch("cli");
  EXPECT_EQ(run_cli("verdict --config " + kScenarios + "/harrod_ces.cfg --out " + dir.string() + " --seed 7"), 0);
  EXPECT_TRUE(fs::exists(dir / "verdict_report.txt"));

  const auto bad = dir / "bad.cfg";
  std::ofstream(bad) << "[production]\nfamily = cobb_douglas\nalpha = 1.5\n[model]\ns=0.2\ndelta=0.05\nn=0.01\n";
  EXPECT_EQ(run_cli("verdict --config " + bad.string() + " --out " + dir.string()), 1);
  EXPECT_NE(run_cli("verdict --out " + dir.string()), 0);
  EXPECT_NE(run_cli("nonsense --config " + bad.string() + " --out " + dir.string()), 0);
}
