#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sfrl/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "sfrl");
  std::ostringstream out, err;
  const int code = sfrl::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sfrl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("SFRL_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("SFRL_SEED");
  }

  std::string write(const std::string& name, const json& j) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p.string();
  }

  fs::path dir_;
};

json slurp(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_F(CliTest, ChansimEvalPassesOnBsc) {
  const auto k = write("k.json", json{{"bsc", 0.11}});
  const auto s = write("s.json", json{0.5, 0.5});
  const CliRun r = run({"--seed", "7", "--trials", "10000", "--out", (dir_ / "o").string(), "chansim", "eval", "--kernel",
                     k, "--source", s});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_TRUE(doc["pass"].get<bool>());
  EXPECT_EQ(doc["seed"], 7);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "reports" / "chansim_eval.json"));
  EXPECT_TRUE(fs::exists(dir_ / "o" / "session_ledger.json"));
}

TEST_F(CliTest, EfiExampleKTwo) {
  const CliRun r = run({"efi", "example", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json fam = json::parse(r.out)["payload"];
  EXPECT_NEAR(fam["h_v"].get<double>(), 1.75, 1e-9);
  EXPECT_NEAR(fam["i_xy"].get<double>(), 0.25, 1e-9);
}

TEST_F(CliTest, InfeasibleLossyTargetExitsTwo) {
  const auto cfg = write("c.json", json{{"source", {0.5, 0.5}}, {"distortion", {{0.1, 1.0}, {1.0, 0.1}}}, {"D", 0.01}});
  const CliRun r = run({"lossy", "eval", "--config", cfg});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(CliTest, UsageAndConfigErrorsExitTwo) {
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"capacity"}).code, 2);
  EXPECT_EQ(run({"capacity", "--kernel", (dir_ / "missing.json").string()}).code, 2);
  const auto bad = write("bad.json", json{{"rows", {{0.5, 0.6}}}});
  EXPECT_EQ(run({"capacity", "--kernel", bad}).code, 2);
}

TEST_F(CliTest, SessionReuseIsRejected) {
  const auto k = write("k.json", json{{"bsc", 0.11}});
  const auto s = write("s.json", json{0.5, 0.5});
  const std::string out = (dir_ / "o").string();
  const std::vector<std::string> enc = {"--out", out, "chansim", "encode", "--kernel", k, "--source", s,
                                        "--session", "10", "--x", "0", "1", "1"};
  ASSERT_EQ(run(enc).code, 0);
  const CliRun again = run(enc);
  EXPECT_EQ(again.code, 2);
  // A disjoint session range is fine.
  auto moved = enc;
  moved[9] = "100";
  EXPECT_EQ(run(moved).code, 0);
}

TEST_F(CliTest, EncodeDecodeThroughContainer) {
  const auto k = write("k.json", json{{"rows", {{0.7, 0.2, 0.1}, {0.1, 0.3, 0.6}}}});
  const auto s = write("s.json", json{0.4, 0.6});
  const std::string bits = (dir_ / "m.sfrl").string();
  const CliRun e = run({"chansim", "encode", "--kernel", k, "--source", s, "--session", "5", "--x", "0", "1", "0", "1",
                     "--bits", bits});
  ASSERT_EQ(e.code, 0) << e.err;
  const CliRun d = run({"chansim", "decode", "--kernel", k, "--source", s, "--session", "5", "--bits", bits});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(json::parse(e.out)["payload"]["outputs"], json::parse(d.out)["payload"]["outputs"]);
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
  const auto k = write("k.json", json{{"bsc", 0.2}});
  setenv("SFRL_SEED", "99", 1);
  EXPECT_EQ(json::parse(run({"capacity", "--kernel", k}).out)["seed"], 99);
  EXPECT_EQ(json::parse(run({"--seed", "3", "capacity", "--kernel", k}).out)["seed"], 3);
  setenv("SFRL_SEED", "abc", 1);
  EXPECT_EQ(run({"capacity", "--kernel", k}).code, 2);
  unsetenv("SFRL_SEED");
  EXPECT_EQ(json::parse(run({"capacity", "--kernel", k}).out)["seed"], 1);
}

TEST_F(CliTest, ReportsAreReproducibleAndStaleDigestsFlagged) {
  const auto k1 = write("k1.json", json{{"bsc", 0.1}});
  const auto k2 = write("k2.json", json{{"bsc", 0.2}});
  const std::string out = (dir_ / "o").string();
  ASSERT_EQ(run({"--out", out, "capacity", "--kernel", k1}).code, 0);
  const json first = slurp(dir_ / "o" / "reports" / "capacity.json");
  ASSERT_EQ(run({"--out", out, "capacity", "--kernel", k1}).code, 0);
  EXPECT_EQ(slurp(dir_ / "o" / "reports" / "capacity.json"), first);
  EXPECT_FALSE(slurp(dir_ / "o" / "records" / "capacity.json").contains("replaced_stale_digest"));

  const CliRun changed = run({"--out", out, "capacity", "--kernel", k2});
  ASSERT_EQ(changed.code, 0);
  EXPECT_NE(changed.err.find("stale"), std::string::npos);
  const json record = slurp(dir_ / "o" / "records" / "capacity.json");
  EXPECT_EQ(record["replaced_stale_digest"], first["config_digest"]);
  EXPECT_TRUE(record.contains("timestamp"));
}

TEST_F(CliTest, CsvFormatAndSweepTable) {
  const CliRun r = run({"--format", "csv", "efi", "example", "--sweep", "1..3", "--emit-csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  const CliRun c = run({"--format", "csv", "efi", "example", "--k", "1"});
  EXPECT_EQ(c.out.rfind("key,value\n", 0), 0u);
}

TEST_F(CliTest, RateDistortionReportsClosedForm) {
  const auto cfg = write("rd.json", json{{"source", {0.5, 0.5}}, {"distortion", "hamming"}, {"D", 0.11}});
  const CliRun r = run({"rd", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  const json p = json::parse(r.out)["payload"];
  EXPECT_NEAR(p["rate"].get<double>(), p["closed_form_rate"].get<double>(), 1e-3);
}
