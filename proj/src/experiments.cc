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

#include "rankdiag/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "rankdiag/bootstrap.h"
#include "rankdiag/diagram.h"
#include "rankdiag/error.h"
#include "rankdiag/estimator.h"
#include "rankdiag/inference.h"
#include "rankdiag/parallel.h"
#include "rankdiag/random.h"

namespace rankdiag {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void CheckReplications(int replications) {
  if (replications < 1) {
    throw Error(ErrorCode::kInvalidConfig, "replications must be >= 1");
  }
}

struct Replicate {
  SimulationConfig sim;
  ComparisonDataset ds;
  ScoreField field;
};

Replicate SimulateAndFit(const SimulationConfig& base, int replication,
                         const EvalGrid& grid, const FitOverrides& fit) {
  Replicate rep;
  rep.sim = base;
  rep.sim.seed = ReplicationSeed(base.seed, replication);
  rep.sim.workers = 1;
  rep.ds = SampleDataset(rep.sim);
  EstimatorConfig cfg = DefaultEstimatorConfig(rep.ds);
  if (fit.h) {
    cfg.h = *fit.h;
    if (!fit.lambda) {
      const PlugInNormalizers plug = ComputePlugIns(rep.ds);
      cfg.lambda = DefaultLambda(rep.ds.n, plug.p_hat, plug.l_bar, cfg.h,
                                 rep.ds.d);
    }
  }
  if (fit.lambda) cfg.lambda = *fit.lambda;
  rep.field = FitField(grid, rep.ds, cfg, 1);
  return rep;
}

BootstrapConfig ReplicateBootstrap(const BootstrapConfig& base,
                                   std::uint64_t replication_seed) {
  BootstrapConfig cfg = base;
  cfg.seed = DeriveSeed(replication_seed, StreamTag::kMultiplier, {});
  cfg.workers = 1;
  return cfg;
}

}  // namespace

std::map<std::string, AggregateStat> Aggregate(
    const std::vector<ExperimentRow>& rows) {
  std::map<std::string, double> sum;
  std::map<std::string, int> count;
  for (const ExperimentRow& row : rows) {
    for (const auto& [name, value] : row.metrics) {
      sum[name] += value;
      ++count[name];
    }
  }
  std::map<std::string, AggregateStat> out;
  for (const auto& [name, total] : sum) {
    AggregateStat stat;
    stat.count = count[name];
    stat.mean = total / stat.count;
    double sq = 0.0;
    for (const ExperimentRow& row : rows) {
      auto it = row.metrics.find(name);
      if (it == row.metrics.end()) continue;
      sq += (it->second - stat.mean) * (it->second - stat.mean);
    }
    stat.se = stat.count > 1
                  ? std::sqrt(sq / (stat.count - 1)) / std::sqrt(stat.count)
                  : 0.0;
    out[name] = stat;
  }
  return out;
}

std::uint64_t ReplicationSeed(std::uint64_t seed, int replication) {
  return DeriveSeed(seed, StreamTag::kReplication,
                    {static_cast<std::uint64_t>(replication)});
}

std::vector<ExperimentReport> RunMseSweep(
    const std::vector<MseScenario>& scenarios, int workers) {
  std::vector<ExperimentReport> reports;
  for (const MseScenario& scenario : scenarios) {
    CheckReplications(scenario.replications);
    ValidateSimulationConfig(scenario.sim);
    const Clock::time_point start = Clock::now();
    const EvalGrid grid = MakeGrid(GridSpec::Lattice(scenario.grid_resolution),
                                   scenario.sim.d);
    ExperimentReport report;
    report.scenario = scenario.id;
    report.replications = scenario.replications;
    report.rows.resize(scenario.replications);
    ParallelFor(report.rows.size(), workers, [&](std::size_t r) {
      const Replicate rep =
          SimulateAndFit(scenario.sim, static_cast<int>(r), grid, scenario.fit);
      const int n = rep.ds.n;
      double total = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::vector<double> truth =
            TrueTheta(scenario.sim.score, n, grid.point(g));
        for (int m = 0; m < n; ++m) {
          const double diff = rep.field.theta[g][m] - truth[m];
          total += diff * diff;
        }
      }
      ExperimentRow& row = report.rows[r];
      row.replication = static_cast<int>(r);
      row.seed = rep.sim.seed;
      row.metrics["mse"] = total / (static_cast<double>(grid.size()) * n);
    });
    report.aggregates = Aggregate(report.rows);
    report.wall_seconds = SecondsSince(start);
    reports.push_back(std::move(report));
  }
  return reports;
}

ExperimentReport RunCoverageExperiment(const CoverageConfig& cfg,
                                       int workers) {
  CheckReplications(cfg.replications);
  ValidateSimulationConfig(cfg.sim);
  ValidateBootstrapConfig(cfg.bootstrap);
  const Clock::time_point start = Clock::now();
  const EvalGrid grid =
      MakeGrid(GridSpec::Lattice(cfg.grid_resolution), cfg.sim.d);
  const std::vector<int> order = TrueOrder(cfg.sim.score, cfg.sim.n, grid);

  ExperimentReport report;
  report.scenario = cfg.id;
  report.replications = cfg.replications;
  report.rows.resize(cfg.replications);
  ParallelFor(report.rows.size(), workers, [&](std::size_t r) {
    const Replicate rep =
        SimulateAndFit(cfg.sim, static_cast<int>(r), grid, cfg.fit);
    const BootstrapConfig boot = ReplicateBootstrap(cfg.bootstrap, rep.sim.seed);
    const std::vector<ReplicateSummary> summaries =
        MultiplierBootstrap(rep.field, rep.ds).Run(boot);
    ExperimentRow& row = report.rows[r];
    row.replication = static_cast<int>(r);
    row.seed = rep.sim.seed;
    if (cfg.band) {
      const ConfidenceBand band =
          ConfidenceBandFromSummaries(rep.field, summaries, boot);
      bool covered = true;
      for (std::size_t g = 0; g < grid.size() && covered; ++g) {
        const std::vector<double> truth =
            TrueTheta(cfg.sim.score, cfg.sim.n, grid.point(g));
        for (int m = 0; m < cfg.sim.n; ++m) {
          if (truth[m] < band.lower[g][m] || truth[m] > band.upper[g][m]) {
            covered = false;
            break;
          }
        }
      }
      row.metrics["band_covered"] = covered ? 1.0 : 0.0;
      row.metrics["half_width"] = band.half_width;
    }
    if (cfg.diagram) {
      const ConfidenceDiagram diagram =
          DiagramFromSummaries(rep.field, summaries, boot);
      row.metrics["diagram_covered"] =
          IsLinearExtension(diagram, order) ? 1.0 : 0.0;
      row.metrics["rejected_pairs"] =
          static_cast<double>(diagram.rejected.size());
      const int top = *std::max_element(diagram.levels.begin(),
                                        diagram.levels.end());
      const int best = order.front();
      const std::vector<RankRange> ranks = PossibleRanks(diagram);
      const bool alone =
          std::count(diagram.levels.begin(), diagram.levels.end(), top) == 1;
      row.metrics["levels"] = top;
      row.metrics["top_unique"] =
          alone && diagram.levels[best] == top && ranks[best].min_rank == 1 &&
                  ranks[best].max_rank == 1
              ? 1.0
              : 0.0;
    }
  });
  report.aggregates = Aggregate(report.rows);
  report.wall_seconds = SecondsSince(start);
  return report;
}

ExperimentReport RunPairTestExperiment(const PairTestConfig& cfg,
                                       int workers) {
  CheckReplications(cfg.replications);
  ValidateSimulationConfig(cfg.sim);
  ValidateBootstrapConfig(cfg.bootstrap);
  if (cfg.i < 0 || cfg.i >= cfg.sim.n || cfg.j < 0 || cfg.j >= cfg.sim.n ||
      cfg.i == cfg.j) {
    throw Error(ErrorCode::kIndexOutOfRange, "pair indices must be distinct "
                                             "and inside 1..n");
  }
  const Clock::time_point start = Clock::now();
  const EvalGrid grid =
      MakeGrid(GridSpec::Lattice(cfg.grid_resolution), cfg.sim.d);

  ExperimentReport report;
  report.scenario = cfg.id;
  report.replications = cfg.replications;
  report.rows.resize(cfg.replications);
  ParallelFor(report.rows.size(), workers, [&](std::size_t r) {
    const Replicate rep =
        SimulateAndFit(cfg.sim, static_cast<int>(r), grid, cfg.fit);
    const BootstrapConfig boot = ReplicateBootstrap(cfg.bootstrap, rep.sim.seed);
    ExperimentRow& row = report.rows[r];
    row.replication = static_cast<int>(r);
    row.seed = rep.sim.seed;
    try {
      const TestResult result =
          PairwiseTest(cfg.i, cfg.j, rep.field, rep.ds, boot);
      row.metrics["reject"] = result.reject ? 1.0 : 0.0;
      row.metrics["statistic"] = result.statistic;
      row.metrics["critical"] = result.critical;
      row.metrics["untestable"] = 0.0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAllWindowsEmpty) throw;
      row.metrics["reject"] = 0.0;
      row.metrics["untestable"] = 1.0;
    }
  });
  report.aggregates = Aggregate(report.rows);
  report.wall_seconds = SecondsSince(start);
  return report;
}

}  // namespace rankdiag
