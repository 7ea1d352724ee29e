#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "pct/cli/commands.h"
#include "pct/cli/config.h"

namespace pct {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult RunPct(std::vector<std::string> args) {
  args.insert(args.begin(), "pct");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pct_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string WriteConfig(const std::string& text) {
    const fs::path p = dir_ / "config.json";
    std::ofstream(p) << text;
    return p.string();
  }
  std::string Slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, UnknownConfigKeyReportsFileAndLine) {
  const absl::StatusOr<RunConfig> c =
      RunConfigFromText("{\n  \"seed\": 3,\n  \"world\": {\n    \"agentz\": 5\n  }\n}\n",
                        "run.json");
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.status().message().find("run.json:4:"), std::string::npos) << c.status();
  EXPECT_NE(c.status().message().find("agentz"), std::string::npos);
}

TEST_F(CliTest, OutOfRangeValueIsRejectedBeforeWork) {
  const std::string path = WriteConfig("{\"scenario\": {\"adoption_rate\": 1.5}}");
  const CliResult r = RunPct({"simulate", "--config", path, "--run-dir", (dir_ / "out").string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("adoption_rate"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "out" / "summary.json"));
}

TEST_F(CliTest, ModelMethodWithoutCheckpointFails) {
  const CliResult r = RunPct({"simulate", "--method", "ds-pct", "--agents", "50", "--days", "5",
                           "--run-dir", (dir_ / "out").string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("checkpoint required"), std::string::npos) << r.err;
}

TEST_F(CliTest, EmptySweepGridFails) {
  RunConfig c;
  c.subcommand = "sweep";
  c.grid.clear();
  const absl::Status s = ValidateRunConfig(c);
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.message().find("grid"), std::string::npos);
}

TEST_F(CliTest, SimulateTwiceIsByteIdentical) {
  auto sim = [&](const std::string& name) {
    const CliResult r = RunPct({"simulate", "--method", "bct", "--agents", "200", "--days", "20",
                             "--seed", "4", "--run-dir", (dir_ / name).string()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
  };
  sim("a");
  sim("b");
  for (const char* f : {"events.jsonl", "metrics.csv", "summary.json"}) {
    EXPECT_FALSE(Slurp(dir_ / "a" / f).empty()) << f;
    EXPECT_EQ(Slurp(dir_ / "a" / f), Slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  const std::string path = WriteConfig("{\"seed\": 3, \"agents\": 120, \"days\": 4}");
  const CliResult r =
      RunPct({"simulate", "--config", path, "--seed", "9", "--run-dir", (dir_ / "o").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string manifest = Slurp(dir_ / "o" / "manifest.json");
  EXPECT_NE(manifest.find("\"seed\": 9"), std::string::npos) << manifest;
  EXPECT_NE(manifest.find("\"num_agents\": 120"), std::string::npos) << manifest;
}

TEST_F(CliTest, ConfigHashTracksContent) {
  RunConfig a, b;
  b.seed = a.seed + 1;
  EXPECT_EQ(ConfigHash(a), ConfigHash(a));
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
}

TEST_F(CliTest, UnknownSubcommandFails) {
  EXPECT_NE(RunPct({"frobnicate"}).code, kExitOk);
}

}  // namespace
}  // namespace pct
