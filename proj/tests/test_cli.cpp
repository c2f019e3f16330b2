#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "driftap/cli.hpp"

using namespace driftap;
using cli::parse;

namespace {

int invoke(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "driftap");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream o, e;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("driftap_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Parse, Defaults) {
  const cli::CliArgs a = parse({"run"});
  EXPECT_EQ(a.subcommand, "run");
  EXPECT_EQ(a.run.scheme, SchemeKind::AP);
  EXPECT_EQ(a.run.mode, SpeedMode::NonResolved);
  EXPECT_EQ(a.run.epsilon, 1e-6);
  EXPECT_EQ(a.run.cfl, 0.5);
  EXPECT_EQ(a.run.nx, 100);
  EXPECT_EQ(a.run.ny, 100);
  EXPECT_EQ(a.run.t_final, 0.1);
  EXPECT_EQ(a.run.case_kind, CaseKind::Prepared);
}

TEST(Parse, HeadlineRun) {
  const cli::CliArgs a =
      parse({"run", "--scheme", "ap", "--mode", "nonresolved", "--epsilon", "1e-6", "--t-final", "0.1"});
  RunConfig expected;
  expected.out_dir = "results";
  EXPECT_EQ(a.run, expected);
}

TEST(Parse, AllFlags) {
  const cli::CliArgs a = parse({"run", "--scheme=conventional", "--mode", "resolved", "--epsilon",
                                "1e-5", "--case", "unprepared", "--epsilon-prime", "0.02", "--cfl",
                                "0.4", "--nx", "30", "--ny", "20", "--t-final", "1", "--snapshot",
                                "0.1,0.5", "--out", "o", "--strict", "--max-steps", "7"});
  EXPECT_EQ(a.run.scheme, SchemeKind::Conventional);
  EXPECT_EQ(a.run.mode, SpeedMode::Resolved);
  EXPECT_EQ(a.run.case_kind, CaseKind::Unprepared);
  EXPECT_EQ(a.run.epsilon_prime, 0.02);
  EXPECT_EQ(a.run.cfl, 0.4);
  EXPECT_EQ(a.run.nx, 30);
  EXPECT_EQ(a.run.ny, 20);
  EXPECT_EQ(a.run.snapshot_times, (std::vector<double>{0.1, 0.5}));
  EXPECT_EQ(a.run.out_dir, "o");
  EXPECT_EQ(a.run.max_steps, 7);
  EXPECT_TRUE(a.strict);
}

TEST(Parse, DriftLimitForcesZeroEpsilon) {
  const cli::CliArgs a = parse({"run", "--scheme", "drift-limit", "--mode", "resolved"});
  EXPECT_EQ(a.run.epsilon, 0.0);
  EXPECT_EQ(a.run.mode, SpeedMode::NonResolved);
}

TEST(Parse, ConventionalAtZeroEpsilonRejected) {
  try {
    parse({"run", "--scheme", "conventional", "--epsilon", "0"});
    FAIL();
  } catch (const cli::UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("--epsilon"), std::string::npos);
  }
}

TEST(Parse, UnknownFlagIsUsageError) {
  EXPECT_THROW(parse({"run", "--bogus", "1"}), cli::UsageError);
  EXPECT_THROW(parse({"frobnicate"}), cli::UsageError);
  EXPECT_THROW(parse({}), cli::UsageError);
  EXPECT_EQ(invoke({"run", "--bogus"}), 2);
}

TEST(Parse, BadValueNamesTheFlag) {
  std::string err;
  EXPECT_EQ(invoke({"run", "--cfl", "2"}, nullptr, &err), 2);
  EXPECT_NE(err.find("--cfl"), std::string::npos) << err;
  EXPECT_EQ(invoke({"run", "--nx", "abc"}, nullptr, &err), 2);
  EXPECT_NE(err.find("--nx"), std::string::npos) << err;
  EXPECT_EQ(invoke({"run", "--mode", "fast"}, nullptr, &err), 2);
  EXPECT_NE(err.find("--mode"), std::string::npos) << err;
}

TEST(Parse, TablesDispatch) {
  const cli::CliArgs a = parse({"tables", "--preset", "dt-table", "--out", "results/"});
  EXPECT_EQ(a.subcommand, "tables");
  EXPECT_EQ(a.preset, "dt-table");
  EXPECT_EQ(a.out, "results/");
  EXPECT_THROW(parse({"tables"}), cli::UsageError);
  EXPECT_THROW(parse({"tables", "--preset", "nope"}), cli::UsageError);
}

TEST(Parse, Help) {
  std::string out;
  EXPECT_EQ(invoke({"--help"}, &out), 0);
  EXPECT_NE(out.find("run"), std::string::npos);
  EXPECT_EQ(invoke({"run", "--help"}, &out), 0);
  EXPECT_NE(out.find("--epsilon"), std::string::npos);
}

TEST(Config, RoundTrip) {
  RunConfig c;
  EXPECT_EQ(cli::parse_config_text(cli::render_config(c)), c);
  c.scheme = SchemeKind::Conventional;
  c.mode = SpeedMode::Resolved;
  c.epsilon = 1.5e-8;
  c.case_kind = CaseKind::Unprepared;
  c.epsilon_prime = 0.0123456789012345;
  c.cfl = 0.3;
  c.nx = 17;
  c.ny = 33;
  c.t_final = 0.01;
  c.snapshot_times = {0.001, 1.0 / 300.0};
  c.out_dir = "some/dir";
  c.max_steps = 12;
  EXPECT_EQ(cli::parse_config_text(cli::render_config(c)), c);
}

TEST(Config, FileWithFlagOverride) {
  const auto dir = scratch("config");
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "# headline\nscheme = conventional\nmode=resolved\nepsilon = 1e-5\nnx = 40\n";
  const cli::CliArgs a = parse({"run", "--config", file.string(), "--nx", "12"});
  EXPECT_EQ(a.run.scheme, SchemeKind::Conventional);
  EXPECT_EQ(a.run.mode, SpeedMode::Resolved);
  EXPECT_EQ(a.run.epsilon, 1e-5);
  EXPECT_EQ(a.run.nx, 12);
  std::ofstream(file) << "colour = blue\n";
  EXPECT_THROW(parse({"run", "--config", file.string()}), cli::UsageError);
  EXPECT_THROW(parse({"run", "--config", (dir / "missing").string()}), cli::UsageError);
  std::filesystem::remove_all(dir);
}

TEST(Config, RenderedTextRecordsSides) {
  const std::string text = cli::render_config(RunConfig{});
  EXPECT_NE(text.find("I = West"), std::string::npos);
  EXPECT_NE(text.find("IV = North"), std::string::npos);
}

TEST(Execute, RunWritesOutputs) {
  const auto dir = scratch("run");
  std::string out;
  EXPECT_EQ(invoke({"run", "--nx", "10", "--ny", "10", "--t-final", "0.01", "--out", dir.string()},
                   &out),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "config_resolved.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "metrics.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "snapshot_0.01.csv"));
  std::ifstream f(dir / "config_resolved.txt");
  std::stringstream b;
  b << f.rdbuf();
  EXPECT_EQ(cli::parse_config_text(b.str()).nx, 10);
  std::filesystem::remove_all(dir);
}

TEST(Execute, StrictModeFailsOnDivergence) {
  RunReport r;
  EXPECT_EQ(cli::run_exit_code(r, true), 0);
  r.diverged = true;
  EXPECT_EQ(cli::run_exit_code(r, false), 0);
  EXPECT_EQ(cli::run_exit_code(r, true), 1);
  // a sane run is not affected by --strict
  const auto dir = scratch("strict");
  EXPECT_EQ(invoke({"run", "--nx", "8", "--ny", "8", "--t-final", "0.01", "--strict", "--out",
                    dir.string()}),
            0);
  std::filesystem::remove_all(dir);
}

TEST(Execute, CheckPasses) {
  std::string out;
  EXPECT_EQ(invoke({"check"}, &out), 0);
  EXPECT_NE(out.find("PASS conservation"), std::string::npos);
}
