#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pjinv/cli.hpp"

using namespace pjinv;
using namespace pjinv::cli;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pjinv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

nlohmann::json report(const CliRun& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST(Cli, InvertExample) {
  const CliRun r = invoke({"invert", "--map", "example4", "--target", "0,4", "--anchor", "0,0", "--no-timestamp"});
  ASSERT_EQ(r.code, 0);
  const auto j = report(r);
  EXPECT_EQ(j["result"]["certificate"]["status"], "converged");
  EXPECT_NEAR(j["result"]["certificate"]["final_x"][0].get<double>(), 1.0, 1e-8);
  EXPECT_NEAR(j["result"]["certificate"]["final_x"][1].get<double>(), 1.0, 1e-8);
  EXPECT_FALSE(j.contains("timestamp"));
  for (const char* k : {"tool", "version", "command", "seed", "config", "budgets", "result", "caveats"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST(Cli, IndexDslExample) {
  const CliRun r = invoke({"index", "--map", "(x - y, x + 3*cbrt(y))", "--at", "0,1"});
  ASSERT_EQ(r.code, 0);
  const auto j = report(r);
  const double up = j["result"]["index"]["upper"], lo = j["result"]["index"]["lower"];
  EXPECT_NEAR(up, std::sqrt(2.0), 1e-3);
  EXPECT_LE(lo, up);
  EXPECT_FALSE(j["result"]["falsifier"]["falsified"].get<bool>());
  EXPECT_EQ(j["result"]["pseudo_jacobian"]["kind"], "sampled");
  EXPECT_TRUE(j.contains("timestamp"));
}

TEST(Cli, CertifyExample) {
  const CliRun r = invoke({"certify", "--map", "example4", "--eta", "const:0.3535", "--rmax", "100"});
  ASSERT_EQ(r.code, 0);
  const auto j = report(r);
  EXPECT_TRUE(j["result"]["verdict"]["certified_global"].get<bool>());
  EXPECT_FALSE(j["caveats"].empty());
  EXPECT_NE(j["caveats"][0].get<std::string>().find("sampling covers only"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"certify", "--map", "identity", "--eta", "exp:1", "--rmax", "10"}).code, 2);
  EXPECT_EQ(invoke({"index", "--map", "absabs", "--at", "0,0"}).code, 2);
  EXPECT_EQ(invoke({"falsify", "--map", "identity", "--pj", "sampled", "--at", "0,0"}).code, 0);
  const CliRun bad = invoke({"index", "--map", "(x, q)"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(report(bad)["error"]["kind"], "unknown-identifier");
  const CliRun flag = invoke({"index", "--map", "example4", "--frobnicate", "1"});
  EXPECT_EQ(flag.code, 1);
  EXPECT_NE(report(flag)["error"]["message"].get<std::string>().find("--frobnicate"), std::string::npos);
  const CliRun budget = invoke({"index", "--map", "example4", "--budget", "warp=9"});
  EXPECT_EQ(budget.code, 1);
  EXPECT_NE(report(budget)["error"]["message"].get<std::string>().find("warp"), std::string::npos);
  EXPECT_EQ(invoke({"invert", "--map", "example4"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, PseudoJacobianFile) {
  const auto path = std::filesystem::temp_directory_path() / "pjinv_zero.json";
  std::ofstream(path) << R"({"dim": 2, "vertices": [[0,0,0,0]], "rays": []})";
  const CliRun r = invoke({"falsify", "--map", "identity", "--pj", "file:" + path.string(), "--at", "0,0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(report(r)["result"]["verdict"]["falsified"].get<bool>());
  std::filesystem::remove(path);
}

TEST(Cli, DeterministicReports) {
  const std::vector<std::vector<std::string>> cmds = {
      {"profile", "--map", "example4", "--rho", "1", "--seed", "7", "--no-timestamp"},
      {"invert", "--map", "rotation", "--target", "1,-0.5", "--seed", "7", "--no-timestamp"},
      {"falsify", "--map", "(abs(x), abs(y))", "--pj", "sampled", "--at", "0,0", "--seed", "7", "--no-timestamp"},
      {"audit", "--map", "example4", "--at", "0.5,0.5", "--seed", "7", "--budget", "trials=40,mv_pairs=3",
       "--no-timestamp"}};
  for (const auto& c : cmds) {
    const CliRun a = invoke(c), b = invoke(c);
    EXPECT_EQ(a.out, b.out) << c[0];
    auto threaded = c;
    threaded.push_back("--threads");
    threaded.push_back("3");
    auto ja = report(a), jt = report(invoke(threaded));
    ja["config"].erase("threads");
    jt["config"].erase("threads");
    ja["budgets"]["regularity"].erase("threads");
    jt["budgets"]["regularity"].erase("threads");
    EXPECT_EQ(ja.dump(), jt.dump()) << c[0];
  }
  const CliRun s8 = invoke({"falsify", "--map", "(x, y)", "--pj", "sampled", "--at", "1,1", "--seed", "8", "--no-timestamp"});
  const CliRun s9 = invoke({"falsify", "--map", "(x, y)", "--pj", "sampled", "--at", "1,1", "--seed", "9", "--no-timestamp"});
  EXPECT_NE(s8.out, s9.out);
}

TEST(Cli, SeedFromEnvironment) {
  ::setenv("PJINV_SEED", "31", 1);
  const auto j = report(invoke({"dini", "--map", "identity", "--no-timestamp"}));
  EXPECT_EQ(j["seed"], 31);
  EXPECT_EQ(j["config"]["seed_source"], "env");
  const auto k = report(invoke({"dini", "--map", "identity", "--seed", "5", "--no-timestamp"}));
  EXPECT_EQ(k["seed"], 5);
  ::unsetenv("PJINV_SEED");
  EXPECT_EQ(report(invoke({"dini", "--map", "identity"}))["seed"], 0);
}

TEST(Cli, CsvTextAndTrace) {
  const CliRun csv = invoke({"profile", "--map", "identity", "--rho", "1", "--format", "csv"});
  EXPECT_EQ(csv.out.rfind("t,eta_lower,samples\n", 0), 0u);
  const CliRun text = invoke({"index", "--map", "identity", "--format", "text"});
  EXPECT_NE(text.out.find("result.index.lower: 1"), std::string::npos);
  const CliRun tr = invoke({"invert", "--map", "identity", "--target", "1,1", "--format", "csv"});
  EXPECT_EQ(tr.out.rfind("t,x1,x2,alpha_floor,residual\n", 0), 0u);
  const auto out = std::filesystem::temp_directory_path() / "pjinv_cert.json";
  const CliRun f = invoke({"invert", "--map", "identity", "--target", "1,1", "--trace", "csv", "--out", out.string()});
  EXPECT_EQ(f.code, 0);
  EXPECT_TRUE(f.out.empty());
  EXPECT_TRUE(std::filesystem::exists(out.string() + ".trace.csv"));
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".trace.csv");
}
