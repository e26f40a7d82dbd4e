#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string err;
};

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("imgeo_cli_" + name);
  fs::remove_all(p);
  return p;
}

CliResult run(const std::string& args, const std::string& env = "") {
  const fs::path err = fs::temp_directory_path() / "imgeo_cli_stderr.txt";
  const std::string cmd = env + " \"" + std::string(IMGEO_CLI) + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

nlohmann::json manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return nlohmann::json::parse(in);
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string s;
  int n = 0;
  while (std::getline(in, s)) ++n;
  return n;
}

}  // namespace

TEST(Cli, GffDeterministicAndCreatesDirectory) {
  const fs::path a = scratch("gff_a") / "nested", b = scratch("gff_b");
  ASSERT_EQ(run("gff --n 33 --out " + a.string()).code, 0);
  ASSERT_EQ(run("gff --n 33 --out " + b.string()).code, 0);
  EXPECT_TRUE(fs::exists(a / "field.ppm"));
  EXPECT_EQ(manifest(a)["outputs"], manifest(b)["outputs"]);
}

TEST(Cli, BadKappaNamesParameter) {
  const CliResult r = run("gff --kappa 7 --out " + scratch("bad").string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--kappa"), std::string::npos);
}

TEST(Cli, FlowOneStartOneAngle) {
  const fs::path d = scratch("flow");
  ASSERT_EQ(run("flow --n 33 --at 0.1,0.2 --theta 0.5 --out " + d.string()).code, 0);
  std::ifstream in(d / "lines.csv");
  std::string line;
  std::getline(in, line);
  std::set<std::string> ids;
  while (std::getline(in, line)) ids.insert(line.substr(0, line.find(',')));
  EXPECT_EQ(ids.size(), 1u);
}

TEST(Cli, ReplayReproducesHashes) {
  const fs::path a = scratch("replay_a"), b = scratch("replay_b");
  ASSERT_EQ(run("flow --n 33 --starts 20 --theta 1.5707963267948966,-1.5707963267948966 --seed 5 --out " + a.string()).code, 0);
  ASSERT_EQ(run("flow --config " + (a / "manifest.json").string() + " --out " + b.string()).code, 0);
  EXPECT_EQ(manifest(a)["outputs"], manifest(b)["outputs"]);
}

TEST(Cli, SleChordalWritesCsvPair) {
  const fs::path d = scratch("sle");
  ASSERT_EQ(run("sle --kind chordal --kappa 2 --horizon 0.1 --resolution 10 --out " + d.string()).code, 0);
  EXPECT_EQ(count_lines(d / "driver.csv"), 1002);
  EXPECT_EQ(count_lines(d / "trace.csv"), 102);
}

TEST(Cli, WholePlaneWithoutBurnInIsConfigError) {
  const CliResult r = run("sle --kind whole-plane --kappa 2 --burn-in 0 --out " + scratch("wp").string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("burn_in"), std::string::npos);
}

TEST(Cli, RadialTwistingReport) {
  const fs::path d = scratch("radial");
  ASSERT_EQ(run("sle --kind radial --kappa 2 --horizon 4 --eps 0.2,0.1 --out " + d.string()).code, 0);
  std::ifstream in(d / "twisting.json");
  EXPECT_EQ(nlohmann::json::parse(in).size(), 2u);
}

TEST(Cli, SpacefillMeshTwo) {
  const fs::path d = scratch("sf");
  ASSERT_EQ(run("spacefill --kappa 6 --rho -0.5,-0.5 --mesh 2 --n 17 --reverse --out " + d.string()).code, 0);
  EXPECT_EQ(count_lines(d / "curve.csv"), 5);
  EXPECT_TRUE(manifest(d)["results"].contains("reversal_ks_d"));
}

TEST(Cli, VerifyUnknownTestIsUsageError) {
  const CliResult r = run("verify --test nope --out " + scratch("v").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
}

TEST(Cli, SeedEnvironmentOverride) {
  const fs::path a = scratch("env_a"), b = scratch("env_b"), c = scratch("env_c");
  ASSERT_EQ(run("gff --n 17 --seed 3 --out " + a.string(), "IMGEO_SEED=9").code, 0);
  ASSERT_EQ(run("gff --n 17 --seed 9 --out " + b.string()).code, 0);
  ASSERT_EQ(run("gff --n 17 --seed 3 --out " + c.string()).code, 0);
  EXPECT_EQ(manifest(a)["outputs"], manifest(b)["outputs"]);
  EXPECT_NE(manifest(a)["outputs"], manifest(c)["outputs"]);
  EXPECT_EQ(run("gff --out " + a.string(), "IMGEO_SEED=abc").code, 2);
}
