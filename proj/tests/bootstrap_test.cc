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

#include "rankdiag/bootstrap.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rankdiag/error.h"
#include "rankdiag/estimator.h"
#include "rankdiag/simulator.h"
#include "test_util.h"

namespace rankdiag {
namespace {

using testing::Cmp;
using testing::MakeDataset;
using testing::MakeEdge;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

ComparisonDataset HandDataset() {
  return MakeDataset(
      3, 1,
      {MakeEdge(0, 1, {Cmp({0.2}, 1), Cmp({0.3}, 0), Cmp({0.7}, 1)}),
       MakeEdge(0, 2, {Cmp({0.8}, 0)}),
       MakeEdge(1, 2, {Cmp({0.6}, 1), Cmp({0.35}, 1)})});
}

ScoreField HandField() {
  ScoreField field;
  field.grid = MakeGrid(GridSpec::Explicit({{0.25}, {0.75}}), 1);
  field.kernel = {KernelFamily::kEpanechnikov, 0.3};
  field.lambda = 0.01;
  field.xi = 6;
  field.theta = {{0.2, -0.1, -0.1}, {-0.3, 0.5, -0.2}};
  field.diag.resize(2);
  return field;
}

MultiplierDraw HandDraw() {
  return MultiplierDraw{{0.5, -1.2, 0.3, 0.8, -0.4, 1.1}};
}

// [point][model]
const double kVbar[2][3] = {
    {0.19805650252722465, 0.2906490951198173, 0.09259259259259262},
    {0.1876736201963139, 0.1559385064481973, 0.17030565955630975}};
const double kGbar[2][3] = {
    {0.32321942520965685, -0.11951572150595313, -0.20370370370370375},
    {-0.13245543172743343, -0.12120018388398451, 0.2536556156114179}};
const double kW[2][3] = {
    {-2.1894982407392196, 0.5516864469653527, 2.9516097302997224},
    {0.9468971153915242, 1.042764316099541, -1.9982584284962706}};

TEST(MultiplierDrawTest, DeterministicPerReplicate) {
  const MultiplierDraw a = MultiplierDraw::Generate(50, 7, 3);
  const MultiplierDraw b = MultiplierDraw::Generate(50, 7, 3);
  const MultiplierDraw c = MultiplierDraw::Generate(50, 7, 4);
  const MultiplierDraw d = MultiplierDraw::Generate(50, 8, 3);
  EXPECT_EQ(a.xi, b.xi);
  EXPECT_NE(a.xi, c.xi);
  EXPECT_NE(a.xi, d.xi);
  EXPECT_EQ(a.xi.size(), 50u);
}

TEST(MultiplierDrawTest, StandardNormalMoments) {
  const MultiplierDraw draw = MultiplierDraw::Generate(200000, 1, 0);
  const double mean =
      std::accumulate(draw.xi.begin(), draw.xi.end(), 0.0) / draw.xi.size();
  double var = 0.0;
  for (double v : draw.xi) var += (v - mean) * (v - mean);
  var /= draw.xi.size() - 1;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.015);
}

TEST(VbarGbarTest, MatchHandComputation) {
  const ScoreField field = HandField();
  const ComparisonDataset ds = HandDataset();
  for (std::size_t g = 0; g < 2; ++g) {
    for (int m = 0; m < 3; ++m) {
      EXPECT_NEAR(Vbar(m, field.grid.point(g), field, ds, field.kernel),
                  kVbar[g][m], 1e-15);
      EXPECT_NEAR(
          Gbar(m, field.grid.point(g), field, ds, field.kernel, HandDraw()),
          kGbar[g][m], 1e-15);
    }
  }
}

TEST(VbarGbarTest, DrawSizeMismatch) {
  EXPECT_RANKDIAG_ERROR(Gbar(0, std::vector<double>{0.25}, HandField(),
                             HandDataset(), HandField().kernel,
                             MultiplierDraw{{1.0, 2.0}}),
                        ErrorCode::kDimensionMismatch);
}

TEST(MultiplierBootstrapTest, WMatchesHandComputation) {
  const MultiplierBootstrap engine(HandField(), HandDataset());
  EXPECT_DOUBLE_EQ(engine.root_scale(), std::sqrt(0.3 * 6));
  EXPECT_EQ(engine.comparisons(), 6u);
  const WMatrix w = engine.W(HandDraw());
  for (std::size_t g = 0; g < 2; ++g) {
    for (int m = 0; m < 3; ++m) {
      EXPECT_TRUE(w.is_valid(m, g));
      EXPECT_NEAR(engine.vbar(m, g), kVbar[g][m], 1e-15);
      EXPECT_NEAR(w.at(m, g), kW[g][m], 1e-13);
    }
  }
  const WMatrix direct = WProcess(HandField(), HandDataset(), HandDraw());
  EXPECT_EQ(direct.values, w.values);
}

TEST(MultiplierBootstrapTest, SummaryMatchesHandComputation) {
  const MultiplierBootstrap engine(HandField(), HandDataset());
  const ReplicateSummary s = engine.Summarize(engine.W(HandDraw()));
  EXPECT_NEAR(s.band, 2.9516097302997224, 1e-13);
  const double expected[3][3] = {
      {kNegInf, -0.0958672007080168, 2.945155543887795},
      {2.7411846877045725, kNegInf, 3.0410227445958116},
      {5.141107971038942, 2.3999232833343696, kNegInf}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        EXPECT_EQ(s.pair[i * 3 + j], kNegInf);
      } else {
        EXPECT_NEAR(s.pair[i * 3 + j], expected[i][j], 1e-13);
      }
    }
  }
}

TEST(MultiplierBootstrapTest, ModelWithoutDataIsInvalid) {
  ComparisonDataset ds = HandDataset();
  ds.n = 4;
  ScoreField field = HandField();
  for (auto& row : field.theta) row.push_back(0.0);
  const MultiplierBootstrap engine(field, ds);
  const WMatrix w = engine.W(HandDraw());
  EXPECT_FALSE(w.is_valid(3, 0));
  EXPECT_FALSE(w.is_valid(3, 1));
  const ReplicateSummary s = engine.Summarize(w);
  EXPECT_EQ(s.pair[0 * 4 + 3], kNegInf);
  EXPECT_EQ(s.pair[3 * 4 + 1], kNegInf);
  BootstrapConfig cfg;
  cfg.replicates = 5;
  EXPECT_RANKDIAG_ERROR(DrawSup(Functional::Pair(3, 0), {s}, cfg, 4),
                        ErrorCode::kAllWindowsEmpty);
}

TEST(MultiplierBootstrapTest, NoDataAnywhereRaises) {
  ScoreField field = HandField();
  field.grid = MakeGrid(GridSpec::Explicit({{0.0}}), 1);
  field.theta = {{0, 0, 0}};
  field.kernel.h = 0.05;
  EXPECT_RANKDIAG_ERROR(
      WProcess(field, HandDataset(), HandDraw()), ErrorCode::kAllWindowsEmpty);
}

TEST(MultiplierBootstrapTest, ZeroMultipliersGiveZeroSups) {
  BootstrapConfig cfg;
  cfg.replicates = 4;
  cfg.zero_multipliers = true;
  const auto summaries =
      MultiplierBootstrap(HandField(), HandDataset()).Run(cfg);
  for (const ReplicateSummary& s : summaries) {
    EXPECT_EQ(s.band, 0.0);
    EXPECT_EQ(s.pair[1], 0.0);
  }
}

TEST(MultiplierBootstrapTest, RunUsesReplicateStreams) {
  BootstrapConfig cfg;
  cfg.replicates = 6;
  cfg.seed = 21;
  const MultiplierBootstrap engine(HandField(), HandDataset());
  const auto summaries = engine.Run(cfg);
  for (int b = 0; b < 6; ++b) {
    const ReplicateSummary s =
        engine.Summarize(engine.W(MultiplierDraw::Generate(6, 21, b)));
    EXPECT_EQ(summaries[b].band, s.band);
    EXPECT_EQ(summaries[b].pair, s.pair);
  }
}

TEST(MultiplierBootstrapTest, WorkerCountDoesNotChangeDraws) {
  SimulationConfig sim;
  sim.n = 6;
  sim.d = 2;
  sim.L = 20;
  const ComparisonDataset ds = SampleDataset(sim);
  const ScoreField field = FitField(MakeGrid(GridSpec::Lattice(3), 2), ds,
                                    DefaultEstimatorConfig(ds));
  BootstrapConfig cfg;
  cfg.replicates = 40;
  cfg.seed = 5;
  cfg.workers = 1;
  const BootstrapDraws one = DrawSup(Functional::Band(), field, ds, cfg);
  cfg.workers = 4;
  const BootstrapDraws four = DrawSup(Functional::Band(), field, ds, cfg);
  EXPECT_EQ(one.samples, four.samples);
  EXPECT_EQ(one.samples.size(), 40u);
}

TEST(DrawSupTest, FunctionalsReadSummaries) {
  ReplicateSummary s;
  s.band = 4.0;
  s.pair = {kNegInf, 1.0, -2.0,  //
            0.5, kNegInf, 3.0,   //
            kNegInf, -1.0, kNegInf};
  BootstrapConfig cfg;
  cfg.replicates = 1;
  const std::vector<ReplicateSummary> one = {s};
  EXPECT_EQ(DrawSup(Functional::Band(), one, cfg, 3).samples[0], 4.0);
  EXPECT_EQ(DrawSup(Functional::Pair(1, 2), one, cfg, 3).samples[0], 3.0);
  EXPECT_EQ(DrawSup(Functional::TopK(0), one, cfg, 3).samples[0], 1.0);
  EXPECT_EQ(DrawSup(Functional::TopK(2), one, cfg, 3).samples[0], -1.0);
  EXPECT_EQ(
      DrawSup(Functional::Diagram({{0, 2}, {2, 1}}), one, cfg, 3).samples[0],
      -1.0);
  EXPECT_RANKDIAG_ERROR(DrawSup(Functional::Pair(1, 1), one, cfg, 3),
                        ErrorCode::kIndexOutOfRange);
  EXPECT_RANKDIAG_ERROR(DrawSup(Functional::TopK(3), one, cfg, 3),
                        ErrorCode::kIndexOutOfRange);
  EXPECT_RANKDIAG_ERROR(DrawSup(Functional::Diagram({}), one, cfg, 3),
                        ErrorCode::kAllWindowsEmpty);
}

TEST(FunctionalTest, DescribeIsOneBased) {
  EXPECT_EQ(Functional::Pair(2, 0).Describe(), "PAIR(3,1)");
  EXPECT_EQ(Functional::Band().Describe(), "BAND");
  EXPECT_EQ(Functional::TopK(0).Describe(), "TOPK(1)");
}

TEST(EmpiricalQuantileTest, OrderStatistics) {
  const std::vector<double> ten = {10, 3, 5, 1, 2, 9, 4, 8, 6, 7};
  EXPECT_EQ(EmpiricalQuantile(ten, 0.9), 9.0);
  EXPECT_EQ(EmpiricalQuantile(ten, 0.95), 10.0);
  EXPECT_EQ(EmpiricalQuantile(ten, 0.05), 1.0);
  EXPECT_EQ(EmpiricalQuantile(ten, 0.5), 5.0);
  std::vector<double> many(200);
  std::iota(many.begin(), many.end(), 1.0);
  EXPECT_EQ(EmpiricalQuantile(many, 0.9), 180.0);
  EXPECT_EQ(EmpiricalQuantile(std::vector<double>{2.5}, 0.99), 2.5);
}

TEST(EmpiricalQuantileTest, RejectsBadInput) {
  EXPECT_RANKDIAG_ERROR(EmpiricalQuantile(std::vector<double>{}, 0.5),
                        ErrorCode::kInvalidConfig);
  EXPECT_RANKDIAG_ERROR(EmpiricalQuantile(std::vector<double>{1.0}, 1.0),
                        ErrorCode::kInvalidConfig);
}

TEST(VbarTest, SingleComparisonAtZeroScores) {
  const ComparisonDataset ds =
      MakeDataset(3, 1, {MakeEdge(0, 1, {Cmp({0.5}, 1)})});
  ScoreField field = HandField();
  field.theta = {{0, 0, 0}, {0, 0, 0}};
  const KernelSpec spec{KernelFamily::kEpanechnikov, 0.2};
  const double w = KernelWeight(spec, std::vector<double>{0.25});
  // n p L = 3 * (1/3) * 1.
  EXPECT_DOUBLE_EQ(Vbar(0, std::vector<double>{0.75}, field, ds, spec),
                   w * 0.25);
  EXPECT_EQ(Vbar(2, std::vector<double>{0.75}, field, ds, spec), 0.0);
  EXPECT_EQ(Vbar(0, std::vector<double>{0.0}, field, ds, spec), 0.0);
}

TEST(VbarTest, LinearInKernelWeights) {
  const ScoreField field = HandField();
  const ComparisonDataset ds = HandDataset();
  const KernelSpec wide{KernelFamily::kUniformBox, 0.8};
  const KernelSpec narrow{KernelFamily::kUniformBox, 0.4};
  const std::vector<double> x = {0.5};
  // Both windows hold every prompt; the narrow one weighs each twice as much.
  EXPECT_NEAR(Vbar(1, x, field, ds, narrow), 2.0 * Vbar(1, x, field, ds, wide),
              1e-15);
}

TEST(GbarTest, ZeroMultipliersOrZeroResidualsGiveZero) {
  const ScoreField field = HandField();
  const std::vector<double> x = {0.25};
  EXPECT_EQ(Gbar(0, x, field, HandDataset(), field.kernel,
                 MultiplierDraw{std::vector<double>(6, 0.0)}),
            0.0);
  // Each win is paired with a loss at the same prompt and multiplier, so the
  // residuals against psi(0) = 1/2 cancel.
  ScoreField flat = field;
  flat.theta = {{0, 0, 0}, {0, 0, 0}};
  const ComparisonDataset balanced = MakeDataset(
      3, 1,
      {MakeEdge(0, 1, {Cmp({0.2}, 1), Cmp({0.2}, 0)}),
       MakeEdge(1, 2, {Cmp({0.3}, 1), Cmp({0.3}, 0)})});
  EXPECT_NEAR(Gbar(1, x, flat, balanced, field.kernel,
                   MultiplierDraw{{0.7, 0.7, -1.3, -1.3}}),
              0.0, 1e-16);
}

TEST(GbarTest, MeanZeroOverDraws) {
  const ScoreField field = HandField();
  const std::vector<double> x = {0.25};
  const int draws = 10000;
  double sum = 0.0;
  double sq = 0.0;
  for (int b = 0; b < draws; ++b) {
    const double g = Gbar(0, x, field, HandDataset(), field.kernel,
                          MultiplierDraw::Generate(6, 77, b));
    sum += g;
    sq += g * g;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt(sq / draws - mean * mean);
  EXPECT_LE(std::abs(mean), 3.0 * sd / std::sqrt(draws));
}

TEST(WProcessTest, ZeroDrawAndLinearity) {
  const MultiplierBootstrap engine(HandField(), HandDataset());
  const WMatrix zero = engine.W(MultiplierDraw{std::vector<double>(6, 0.0)});
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
  MultiplierDraw scaled = HandDraw();
  for (double& v : scaled.xi) v *= -2.5;
  const WMatrix base = engine.W(HandDraw());
  const WMatrix w = engine.W(scaled);
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    EXPECT_NEAR(w.values[k], -2.5 * base.values[k], 1e-13);
  }
}

TEST(WProcessTest, SingleValidCell) {
  const ComparisonDataset ds =
      MakeDataset(3, 1, {MakeEdge(0, 1, {Cmp({0.1}, 1)})});
  ScoreField field = HandField();
  field.xi = 1;
  field.kernel.h = 0.2;
  // Only the point 0.25 sees the comparison; model 2 never plays.
  const WMatrix w = WProcess(field, ds, MultiplierDraw{{1.0}});
  int valid = 0;
  for (std::uint8_t v : w.valid) valid += v;
  EXPECT_EQ(valid, 2);
  EXPECT_TRUE(w.is_valid(0, 0));
  EXPECT_TRUE(w.is_valid(1, 0));
  EXPECT_FALSE(w.is_valid(2, 0));
}

TEST(DrawSupTest, BandSamplesAreNonNegative) {
  BootstrapConfig cfg;
  cfg.replicates = 300;
  const BootstrapDraws d =
      DrawSup(Functional::Band(), HandField(), HandDataset(), cfg);
  for (double v : d.samples) EXPECT_GE(v, 0.0);
}

TEST(DrawSupTest, ZeroHookGivesZeroSamples) {
  BootstrapConfig cfg;
  cfg.replicates = 5;
  cfg.zero_multipliers = true;
  for (const Functional& f :
       {Functional::Band(), Functional::Pair(0, 1), Functional::TopK(2)}) {
    for (double v : DrawSup(f, HandField(), HandDataset(), cfg).samples) {
      EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(DrawSupTest, ReversedPairsAreExchangeable) {
  SimulationConfig sim;
  sim.n = 4;
  sim.d = 1;
  sim.L = 40;
  sim.p = 1.0;
  sim.seed = 31;
  const ComparisonDataset ds = SampleDataset(sim);
  const ScoreField field = FitField(MakeGrid(GridSpec::Lattice(5), 1), ds,
                                    DefaultEstimatorConfig(ds));
  BootstrapConfig cfg;
  cfg.replicates = 2000;
  cfg.seed = 8;
  const MultiplierBootstrap engine(field, ds);
  const auto summaries = engine.Run(cfg);
  const auto a = DrawSup(Functional::Pair(0, 1), summaries, cfg, 4).samples;
  const auto b = DrawSup(Functional::Pair(1, 0), summaries, cfg, 4).samples;
  auto moments = [](const std::vector<double>& v) {
    double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::make_pair(m, s / (v.size() - 1));
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  EXPECT_LE(std::abs(ma - mb), 3.0 * std::sqrt((va + vb) / 2000.0));
}

TEST(EmpiricalQuantileTest, SmallSamples) {
  const std::vector<double> five = {3, 1, 5, 2, 4};
  EXPECT_EQ(EmpiricalQuantile(five, 0.9), 5.0);
  EXPECT_EQ(EmpiricalQuantile(five, 0.2), 1.0);
  const std::vector<double> same(7, 2.5);
  for (double q : {0.01, 0.5, 0.99}) EXPECT_EQ(EmpiricalQuantile(same, q), 2.5);
}

}  // namespace
}  // namespace rankdiag
