#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msrelax/cli.hpp"
#include "msrelax/curve_io.hpp"
#include "msrelax/trajectory.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "msrelax");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = msrelax::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("msrelax_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"checks", "--suite", "nonsense"}).code, 2);
  EXPECT_EQ(run_cli({"simulate"}).code, 2);
  std::ofstream(dir / "bad.cfg") << "colour = red\n";
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "bad.cfg").string()}).code, 2);
}

TEST_F(CliTest, SimulateThenReport) {
  std::ofstream(dir / "run.cfg") << "N = 32\nmodes = 3\namps = 0.01\nt_end = 0.02\nk_H = 0\n";
  const auto sim = run_cli({"simulate", "--config", (dir / "run.cfg").string(), "--set", "c_acc=0.05",
                            "--output-dir", (dir / "out").string()});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto j = nlohmann::json::parse(sim.out);
  EXPECT_EQ(j["status"], "finished");
  const auto traj = (dir / "out" / "trajectory.csv").string();
  EXPECT_TRUE(fs::exists(traj));
  EXPECT_TRUE(fs::exists(dir / "out" / "run.jsonl"));
  const auto rep = run_cli({"report", traj});
  EXPECT_EQ(rep.code, 0);
  EXPECT_NE(rep.out.find("max_energy_balance_error"), std::string::npos);
  const auto chk = run_cli({"checks", "--suite", "eed,diff", "--trajectory", traj});
  EXPECT_EQ(chk.code, 0) << chk.out;
  EXPECT_TRUE(nlohmann::json::parse(chk.out)["pass"].get<bool>());
}

TEST_F(CliTest, ChecksWithoutTrajectory) {
  const auto r = run_cli({"checks", "--suite", "trace,sobolev,fuglede", "--n", "20", "--seed", "4"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["suites"]["fuglede"]["passed"], 20);
  EXPECT_EQ(j["seed"], 4);
}

TEST_F(CliTest, PotentialTableAndNorms) {
  const auto t = run_cli({"potential-table", "--L", "2", "--n", "4"});
  ASSERT_EQ(t.code, 0);
  std::istringstream lines(t.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line != "x,y,Lambda") ++rows;
  EXPECT_EQ(rows, 16);

  const auto c = msrelax::geometry::project_area(msrelax::geometry::from_function(
      [](double p) { return 1.0 + 0.01 * std::cos(2 * p); }, 1.0, 32));
  msrelax::curve_io::save((dir / "c.msrc").string(), c);
  const auto n = run_cli({"norms", (dir / "c.msrc").string()});
  ASSERT_EQ(n.code, 0) << n.err;
  const auto j = nlohmann::json::parse(n.out);
  EXPECT_TRUE(j["admissibility"]["passed"].get<bool>());
  EXPECT_GT(j["D"].get<double>(), 0.0);
  EXPECT_EQ(run_cli({"norms", (dir / "missing.msrc").string()}).code, 1);
}

TEST_F(CliTest, HminusOfIdenticalCurves) {
  const auto c = msrelax::geometry::circle(1.0, 16);
  msrelax::curve_io::save((dir / "a.msrc").string(), c);
  const auto r = run_cli({"hminus", (dir / "a.msrc").string(), (dir / "a.msrc").string(), "--grid", "128",
                          "--direct-grid", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["H"].get<double>(), 0.0, 1e-18);
}
