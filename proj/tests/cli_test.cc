// Copyright 2026 The Rankdiag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rankdiag/cli.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "rankdiag/io.h"

namespace rankdiag {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// The replay summary follows whatever the replayed command printed.
Json LastLine(const std::string& text) {
  const std::size_t end = text.find_last_not_of('\n');
  const std::size_t start = text.rfind('\n', end);
  return ParseJson(text.substr(start == std::string::npos ? 0 : start + 1));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rankdiag_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("RANKDIAG_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("RANKDIAG_SEED");
  }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  std::string Simulate(const std::string& name, const std::string& seed = "3") {
    const CliRun r = Invoke({"simulate", "--n", "4", "--d", "1", "--L", "30",
                          "--p", "1", "--seed", seed, "--out", P(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return P(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Invoke({"--help"}).code, 0);
  EXPECT_EQ(Invoke({}).code, 2);
  EXPECT_EQ(Invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(Invoke({"simulate", "--n", "4"}).code, 2);  // --out missing
  EXPECT_EQ(Invoke({"simulate", "--n", "four", "--out", P("x.json")}).code, 2);
  EXPECT_EQ(Invoke({"--workers", "0", "validate", P("x.json")}).code, 2);
}

TEST_F(CliTest, SimulateIsDeterministicAndWritesManifest) {
  const std::string a = Simulate("a.json");
  const std::string b = Simulate("b.json");
  EXPECT_EQ(ReadTextFile(a), ReadTextFile(b));
  EXPECT_NE(ReadTextFile(a), ReadTextFile(Simulate("c.json", "4")));
  const Json manifest = ParseJson(ReadTextFile(P("a.manifest.json")));
  EXPECT_EQ(manifest["command"], "simulate");
  EXPECT_EQ(manifest["seed"], 3);
  EXPECT_EQ(manifest["outputs"][a], Sha256Hex(ReadTextFile(a)));
}

TEST_F(CliTest, SeedEnvironmentOverridesFlag) {
  const std::string three = Simulate("three.json", "3");
  setenv("RANKDIAG_SEED", "3", 1);
  EXPECT_EQ(ReadTextFile(Simulate("env.json", "99")), ReadTextFile(three));
  setenv("RANKDIAG_SEED", "abc", 1);
  const CliRun r = Invoke({"simulate", "--out", P("bad.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("InvalidConfig"), std::string::npos);
}

TEST_F(CliTest, ValidateReportsSummaryOrTypedError) {
  const CliRun ok = Invoke({"validate", Simulate("d.json")});
  EXPECT_EQ(ok.code, 0);
  const Json summary = ParseJson(ok.out);
  EXPECT_EQ(summary["ok"], true);
  EXPECT_EQ(summary["n"], 4);
  EXPECT_EQ(summary["comparisons"], 180);
  WriteTextFile(P("broken.json"), "{\"n\": 2");
  const CliRun bad = Invoke({"validate", P("broken.json")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(ParseJson(bad.err)["error"], "ParseError");
  const CliRun missing = Invoke({"validate", P("nope.json")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(ParseJson(missing.err)["error"], "IoError");
}

TEST_F(CliTest, InferenceCommandsWriteOutputs) {
  const std::string ds = Simulate("d.json");
  CliRun r = Invoke({"estimate", "--dataset", ds, "--out", P("field.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ParseJson(ReadTextFile(P("field.json")))["n"], 4);

  r = Invoke({"band", "--dataset", ds, "--field", P("field.json"), "--B", "50",
           "--out", P("band")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(P("band.json")));
  EXPECT_EQ(ReadTextFile(P("band.csv")).rfind("model,point,x1,lower", 0), 0u);

  r = Invoke({"test-pairwise", "--dataset", ds, "--field", P("field.json"),
           "--i", "1", "--j", "2", "--B", "50", "--out", P("pair")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(ParseJson(r.out).contains("reject"));

  r = Invoke({"test-topk", "--dataset", ds, "--field", P("field.json"), "--i",
           "1", "--k", "2", "--B", "50", "--out", P("topk")});
  ASSERT_EQ(r.code, 0) << r.err;

  r = Invoke({"diagram", "--dataset", ds, "--B", "50", "--out", P("diag")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(P("diag.field.json")));
  EXPECT_EQ(ReadTextFile(P("diag.dot")).rfind("digraph", 0), 0u);
  EXPECT_EQ(ParseJson(ReadTextFile(P("diag.json")))["n"], 4);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  const std::string ds = Simulate("d.json");
  CliRun r = Invoke({"test-pairwise", "--dataset", ds, "--i", "1", "--j", "9",
                  "--out", P("p")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(ParseJson(r.err)["error"], "IndexOutOfRange");
  r = Invoke({"test-topk", "--dataset", ds, "--i", "1", "--k", "4", "--out",
           P("t")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(ParseJson(r.err)["error"], "BadK");
  r = Invoke({"estimate", "--dataset", ds, "--grid", "lattice:0", "--out",
           P("f.json")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, ManifestReplayReproducesOutputs) {
  const std::string ds = Simulate("d.json");
  ASSERT_EQ(Invoke({"test-pairwise", "--dataset", ds, "--i", "2", "--j", "1",
                 "--B", "40", "--seed", "5", "--out", P("pair")})
                .code,
            0);
  const std::string before = ReadTextFile(P("pair.json"));
  fs::remove(P("pair.json"));
  fs::remove(P("pair.field.json"));
  CliRun r = Invoke({"run", "--manifest", P("pair.manifest.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(LastLine(r.out)["identical"], true) << r.out;
  EXPECT_EQ(ReadTextFile(P("pair.json")), before);

  r = Invoke({"--workers", "3", "run", "--manifest", P("pair.manifest.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(LastLine(r.out)["identical"], true) << r.out;
}

TEST_F(CliTest, ReplayRefusesChangedInputs) {
  const std::string ds = Simulate("d.json");
  ASSERT_EQ(Invoke({"estimate", "--dataset", ds, "--out", P("f.json")}).code, 0);
  Simulate("d.json", "8");
  const CliRun r = Invoke({"run", "--manifest", P("f.manifest.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(ParseJson(r.err)["error"], "IoError");
}

TEST_F(CliTest, ReproduceWritesFigureArtifacts) {
  const CliRun r = Invoke({"reproduce", "--figure", "3", "--reps", "1", "--B",
                        "20", "--out", P("fig3")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(P("fig3/report.json")));
  EXPECT_TRUE(fs::exists(P("fig3/diagram.dot")));
  EXPECT_TRUE(fs::exists(P("fig3/manifest.json")));
  EXPECT_EQ(Invoke({"reproduce", "--figure", "7", "--out", P("x")}).code, 1);
}

TEST_F(CliTest, ExpSumSimulationValidatesAndDiagramRepeats) {
  CliRun r = Invoke({"simulate", "--n", "20", "--d", "3", "--p", "0.2", "--L",
                     "100", "--score", "expsum", "--seed", "7", "--out",
                     P("exp.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Invoke({"validate", P("exp.json")}).code, 0);

  const std::string ds = Simulate("small.json");
  for (const char* out : {"a", "b"}) {
    r = Invoke({"diagram", "--dataset", ds, "--grid", "lattice:5", "--alpha",
                "0.1", "--B", "500", "--seed", "11", "--out", P(out)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(ReadTextFile(P("a.json")), ReadTextFile(P("b.json")));
  EXPECT_EQ(ReadTextFile(P("a.dot")), ReadTextFile(P("b.dot")));
}

TEST(CliBinaryTest, ExitStatusesPropagate) {
  const std::string bin = RANKDIAG_CLI_PATH;
  int status = std::system((bin + " --help > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 0);
  status = std::system((bin + " bogus > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
  status =
      std::system((bin + " validate /nonexistent.json > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}

TEST(CliVersionTest, NonEmpty) { EXPECT_FALSE(ToolVersion().empty()); }

}  // namespace
}  // namespace rankdiag
