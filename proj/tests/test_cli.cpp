#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "accproj_cli_out.txt";
  const std::string cmd = std::string(APSOLVE_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  r.out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("accproj_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, SolvePrintsSummaryLine) {
  const CliRun r = run("solve --problem tridiag:n=100 --solver msap2");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("solver=msap2 sweeps=", 0), 0u) << r.out;
  EXPECT_NE(r.out.find(" residual="), std::string::npos);
}

TEST(Cli, SolveWritesJsonReport) {
  const fs::path dir = scratch("report");
  const CliRun r = run("solve --problem tridiag:n=50 --solver sap --block-size 10 --report " +
                    (dir / "r.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(dir / "r.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["solver"], "sap");
  EXPECT_EQ(j["config"]["block_size"], 10);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_EQ(j["residual_history"].size(), j["sweeps"].get<std::size_t>() + 1);
  EXPECT_TRUE(j["invariant_log"].empty());
  fs::remove_all(dir);
}

TEST(Cli, BaselinesThroughSolve) {
  EXPECT_EQ(run("solve --problem fem:n=50 --solver gmres --restart 50").code, 0);
  EXPECT_EQ(run("solve --problem tridiag:n=40 --solver jacobi --block-size 40").code, 0);
}

TEST(Cli, NonConvergenceExitsTwo) {
  const CliRun r = run("solve --problem tridiag:n=100 --solver sap --max-sweeps 3");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("sweeps=3"), std::string::npos);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("solve --solver foo --problem tridiag:n=10").code, 1);
  EXPECT_EQ(run("solve --problem tridiag:n=10 --tol abc").code, 1);
  EXPECT_EQ(run("solve").code, 1);
  EXPECT_EQ(run("solve --problem tridiag:n=10 --matrix x.mtx").code, 1);
  EXPECT_EQ(run("solve --problem tridiag:n=10 --block-size 50").code, 1);
  EXPECT_EQ(run("solve --matrix /nonexistent/a.mtx").code, 1);
  EXPECT_EQ(run("bench --table t9 --out /tmp/accproj_cli_t9").code, 1);
  EXPECT_EQ(run("bench --table t4").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, GenThenSolveFromMatrixFile) {
  const fs::path dir = scratch("gen");
  const fs::path mtx = dir / "fem.mtx";
  ASSERT_EQ(run("gen --problem fem:n=40 --out " + mtx.string()).code, 0);
  EXPECT_TRUE(fs::exists(mtx));
  EXPECT_TRUE(fs::exists(dir / "fem_b.mtx"));
  const CliRun from_file = run("solve --matrix " + mtx.string() + " --solver msap2 --block-size 10");
  const CliRun from_id = run("solve --problem fem:n=40 --solver msap2 --block-size 10");
  EXPECT_EQ(from_file.code, 0) << from_file.out;
  EXPECT_EQ(from_file.out, from_id.out);
  fs::remove_all(dir);
}

TEST(Cli, BenchWritesBothReports) {
  const fs::path dir = scratch("bench");
  const CliRun r = run("bench --table t4 --out " + dir.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "t4.csv"));
  EXPECT_TRUE(fs::exists(dir / "t4.json"));
  EXPECT_NE(r.out.find("reference=42"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("closest msap2"), std::string::npos);
  EXPECT_EQ(run("bench --table t4 --window 3,x --out " + dir.string()).code, 1);
  fs::remove_all(dir);
}

TEST(Cli, Verify) {
  const CliRun r = run("verify --sizes 5,10,20");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS "), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL "), std::string::npos);
  EXPECT_EQ(run("verify --sizes 5,,7").code, 1);
}
