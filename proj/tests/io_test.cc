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

#include "rankdiag/io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "rankdiag/error.h"
#include "rankdiag/simulator.h"
#include "test_util.h"

namespace rankdiag {
namespace {

using testing::Cmp;
using testing::MakeDataset;
using testing::MakeEdge;

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("rankdiag_io_test_" + name))
      .string();
}

TEST(FileTest, RoundTripAndErrors) {
  const std::string path = TempPath("file.txt");
  WriteTextFile(path, "hello\nworld");
  EXPECT_EQ(ReadTextFile(path), "hello\nworld");
  std::filesystem::remove(path);
  EXPECT_RANKDIAG_ERROR(ReadTextFile(path), ErrorCode::kIoError);
  EXPECT_RANKDIAG_ERROR(WriteTextFile("/nonexistent_dir/x/y.txt", "z"),
                        ErrorCode::kIoError);
}

TEST(Sha256Test, KnownDigests) {
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(JsonTest, ParseErrorsAreTyped) {
  EXPECT_RANKDIAG_ERROR(ParseJson("{\"a\": "), ErrorCode::kParseError);
  EXPECT_EQ(ParseJson("[1, 2]").size(), 2u);
  EXPECT_EQ(DumpJson(Json::array()), "[]\n");
}

TEST(DatasetJsonTest, OneBasedOnDiskAndRoundTrips) {
  ComparisonDataset ds = MakeDataset(
      3, 2, {MakeEdge(0, 2, {Cmp({0.1, 0.2}, 1), Cmp({0.3, 0.4}, 0)})});
  ds.meta["score"] = "constant";
  const Json j = DatasetToJson(ds);
  EXPECT_EQ(j["edges"][0]["i"], 1);
  EXPECT_EQ(j["edges"][0]["j"], 3);
  const ComparisonDataset back = DatasetFromJson(ParseJson(DumpJson(j)));
  EXPECT_EQ(back.n, 3);
  EXPECT_EQ(back.d, 2);
  ASSERT_EQ(back.edges.size(), 1u);
  EXPECT_EQ(back.edges[0].i, 0);
  EXPECT_EQ(back.edges[0].j, 2);
  EXPECT_EQ(back.edges[0].comparisons[1].x, (std::vector<double>{0.3, 0.4}));
  EXPECT_EQ(back.edges[0].comparisons[1].y, 0);
  EXPECT_EQ(back.meta.at("score"), "constant");
}

TEST(DatasetJsonTest, SimulatedDatasetSurvivesExactly) {
  SimulationConfig sim;
  sim.n = 5;
  sim.L = 7;
  const ComparisonDataset ds = SampleDataset(sim);
  const ComparisonDataset back =
      DatasetFromJson(ParseJson(DumpJson(DatasetToJson(ds))));
  EXPECT_EQ(DumpJson(DatasetToJson(back)), DumpJson(DatasetToJson(ds)));
  for (std::size_t e = 0; e < ds.edges.size(); ++e) {
    for (std::size_t k = 0; k < ds.edges[e].comparisons.size(); ++k) {
      EXPECT_EQ(back.edges[e].comparisons[k].x, ds.edges[e].comparisons[k].x);
    }
  }
}

TEST(DatasetJsonTest, MissingFieldIsParseError) {
  EXPECT_RANKDIAG_ERROR(DatasetFromJson(ParseJson(R"({"n": 3, "edges": []})")),
                        ErrorCode::kParseError);
  EXPECT_RANKDIAG_ERROR(
      DatasetFromJson(ParseJson(R"({"n": "three", "d": 1, "edges": []})")),
      ErrorCode::kParseError);
}

TEST(GridArgumentTest, AcceptedForms) {
  EXPECT_EQ(*ParseGridArgument("lattice:7").lattice_resolution, 7);
  const GridSpec inline_spec =
      ParseGridArgument(R"({"points": [[0.1, 0.2], [0.3, 0.4]]})");
  EXPECT_FALSE(inline_spec.lattice_resolution.has_value());
  EXPECT_EQ(inline_spec.points.size(), 2u);
  const std::string path = TempPath("grid.json");
  WriteTextFile(path, DumpJson(GridSpecToJson(GridSpec::Lattice(4))));
  EXPECT_EQ(*ParseGridArgument(path).lattice_resolution, 4);
  std::filesystem::remove(path);
  EXPECT_RANKDIAG_ERROR(ParseGridArgument("lattice:x"),
                        ErrorCode::kParseError);
  EXPECT_RANKDIAG_ERROR(ParseGridArgument("lattice:5x"),
                        ErrorCode::kParseError);
}

TEST(ScoreFieldJsonTest, RoundTripsBitExactly) {
  SimulationConfig sim;
  sim.n = 4;
  sim.d = 2;
  sim.L = 15;
  const ComparisonDataset ds = SampleDataset(sim);
  ScoreField field = FitField(MakeGrid(GridSpec::Lattice(3), 2), ds,
                              DefaultEstimatorConfig(ds));
  field.warnings.push_back("example warning");
  const ScoreField back =
      ScoreFieldFromJson(ParseJson(DumpJson(ScoreFieldToJson(field))));
  EXPECT_EQ(back.theta, field.theta);
  EXPECT_EQ(back.kernel.h, field.kernel.h);
  EXPECT_EQ(back.kernel.family, field.kernel.family);
  EXPECT_EQ(back.lambda, field.lambda);
  EXPECT_EQ(back.xi, field.xi);
  EXPECT_EQ(back.grid.points(), field.grid.points());
  EXPECT_EQ(*back.grid.spec().lattice_resolution, 3);
  EXPECT_EQ(back.warnings, field.warnings);
  ASSERT_EQ(back.diag.size(), field.diag.size());
  EXPECT_EQ(back.diag[0].iters, field.diag[0].iters);
  EXPECT_EQ(back.diag[0].converged, field.diag[0].converged);
}

ConfidenceBand SmallBand() {
  ConfidenceBand band;
  band.alpha = 0.1;
  band.c_hat = 2.0;
  band.half_width = 0.5;
  band.grid = MakeGrid(GridSpec::Explicit({{0.25}, {0.75}}), 1);
  band.center = {{1.0, -1.0}, {0.0, 0.0}};
  band.lower = {{0.5, -1.5}, {-0.5, -0.5}};
  band.upper = {{1.5, -0.5}, {0.5, 0.5}};
  return band;
}

TEST(ConfidenceBandCsvTest, LongFormat) {
  EXPECT_EQ(ConfidenceBandToCsv(SmallBand()),
            "model,point,x1,lower,center,upper\n"
            "1,1,0.25,0.5,1,1.5\n"
            "1,2,0.75,-0.5,0,0.5\n"
            "2,1,0.25,-1.5,-1,-0.5\n"
            "2,2,0.75,-0.5,0,0.5\n");
  const Json j = ConfidenceBandToJson(SmallBand());
  EXPECT_EQ(j["half_width"], 0.5);
  EXPECT_EQ(j["upper"][0][0], 1.5);
}

ConfidenceDiagram SmallDiagram() {
  ConfidenceDiagram d = DiagramFromRelation({{0, 1}, {0, 2}, {1, 2}}, 4, 0.1);
  d.iterations.push_back({3.5, {{0, 2}}});
  d.iterations.push_back({2.25, {{0, 1}, {1, 2}}});
  return d;
}

TEST(DiagramJsonTest, RoundTripsOneBased) {
  const ConfidenceDiagram d = SmallDiagram();
  const Json j = DiagramToJson(d);
  EXPECT_EQ(j["rejected"][0], Json::array({1, 2}));
  EXPECT_EQ(j["levels"], Json::array({3, 2, 1, 1}));
  const ConfidenceDiagram back = DiagramFromJson(ParseJson(DumpJson(j)));
  EXPECT_EQ(back.n, 4);
  EXPECT_EQ(back.rejected, d.rejected);
  EXPECT_EQ(back.hasse_edges, d.hasse_edges);
  EXPECT_EQ(back.levels, d.levels);
  ASSERT_EQ(back.iterations.size(), 2u);
  EXPECT_EQ(back.iterations[1].critical, 2.25);
  EXPECT_EQ(back.iterations[1].newly_rejected, d.iterations[1].newly_rejected);
}

TEST(DiagramDotTest, LevelsAndEdges) {
  const std::string dot = DiagramToDot(SmallDiagram());
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("m1 [label=\"Model 1\"]"), std::string::npos);
  EXPECT_NE(dot.find("{ rank=same; m1; }"), std::string::npos);
  EXPECT_NE(dot.find("{ rank=same; m3; m4; }"), std::string::npos);
  EXPECT_NE(dot.find("m1 -> m2;"), std::string::npos);
  EXPECT_NE(dot.find("m2 -> m3;"), std::string::npos);
  EXPECT_EQ(dot.find("m1 -> m3;"), std::string::npos);
  EXPECT_LT(dot.find("rank=same; m1;"), dot.find("rank=same; m2;"));
}

TEST(TestResultJsonTest, NonFiniteValuesAreStrings) {
  TestResult r;
  r.i = 0;
  r.j = 2;
  r.statistic = -std::numeric_limits<double>::infinity();
  r.critical = 1.5;
  const Json j = TestResultToJson(r);
  EXPECT_NE(j.dump().find("\"-inf\""), std::string::npos);
  EXPECT_NE(j.dump().find("1.5"), std::string::npos);
}

TEST(ReportCsvTest, RowsAndColumns) {
  ExperimentReport report;
  report.scenario = "s";
  report.rows.resize(2);
  report.rows[0].metrics = {{"a", 1.0}, {"b", 0.5}};
  report.rows[1].replication = 1;
  report.rows[1].seed = 9;
  report.rows[1].metrics = {{"a", 3.0}};
  report.aggregates = Aggregate(report.rows);
  EXPECT_EQ(ReportToCsv(report),
            "scenario,replication,seed,a,b\n"
            "s,0,0,1,0.5\n"
            "s,1,9,3,\n");
  const Json j = ReportToJson(report);
  EXPECT_EQ(j["aggregates"]["a"]["mean"], 2.0);
}

TEST(HeatmapCsvTest, OneRowPerModel) {
  RankHeatmap h;
  h.freq = {{1.0, 0.0}, {0.25, 0.75}};
  h.true_rank = {1, 2};
  h.replications = 4;
  EXPECT_EQ(HeatmapToCsv(h),
            "model,true_rank,rank_1,rank_2\n"
            "1,1,1,0\n"
            "2,2,0.25,0.75\n");
}

}  // namespace
}  // namespace rankdiag
