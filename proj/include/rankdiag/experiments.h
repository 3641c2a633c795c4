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

// Monte-Carlo harnesses for the synthetic studies. Replication r of a
// scenario simulates with the seed derived from (scenario seed, r), so a
// report does not depend on the worker count.

#ifndef RANKDIAG_EXPERIMENTS_H_
#define RANKDIAG_EXPERIMENTS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankdiag/core.h"
#include "rankdiag/simulator.h"

namespace rankdiag {

struct ExperimentRow {
  int replication = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
};

struct AggregateStat {
  double mean = 0.0;
  // Standard error of the mean: sample sd / sqrt(count).
  double se = 0.0;
  int count = 0;
};

struct ExperimentReport {
  std::string scenario;
  int replications = 0;
  std::vector<ExperimentRow> rows;
  std::map<std::string, AggregateStat> aggregates;
  double wall_seconds = 0.0;
};

// Per-metric mean and standard error over the rows carrying that metric,
// accumulated in row order.
std::map<std::string, AggregateStat> Aggregate(
    const std::vector<ExperimentRow>& rows);

// Estimator settings of a replication: dataset defaults unless overridden.
struct FitOverrides {
  std::optional<double> h;
  std::optional<double> lambda;
};

std::uint64_t ReplicationSeed(std::uint64_t seed, int replication);

struct MseScenario {
  std::string id;
  SimulationConfig sim;
  int replications = 20;
  int grid_resolution = 5;
  FitOverrides fit;
};

// Metric "mse": mean over grid points and models of (theta_hat - theta*)^2.
std::vector<ExperimentReport> RunMseSweep(
    const std::vector<MseScenario>& scenarios, int workers = 1);

struct CoverageConfig {
  std::string id = "coverage";
  SimulationConfig sim;
  int replications = 50;
  int grid_resolution = 5;
  BootstrapConfig bootstrap;
  bool band = true;
  bool diagram = true;
  FitOverrides fit;
};

// Metrics "band_covered" (every model at every grid point inside the band),
// "half_width", "diagram_covered" (true order is a linear extension),
// "rejected_pairs", "levels" (top level) and "top_unique" (the true best
// model sits alone on the top level with possible rank exactly 1).
// The bootstrap seed of replication r is derived from the replication seed.
ExperimentReport RunCoverageExperiment(const CoverageConfig& cfg,
                                       int workers = 1);

struct PairTestConfig {
  std::string id = "pairwise";
  SimulationConfig sim;
  int replications = 100;
  int grid_resolution = 5;
  BootstrapConfig bootstrap;
  int i = 0;  // H1: theta_i > theta_j everywhere
  int j = 1;
  FitOverrides fit;
};

// Metrics "reject", "statistic", "critical" and "untestable" (the pair never
// shares a grid window with data; counted as no rejection).
ExperimentReport RunPairTestExperiment(const PairTestConfig& cfg,
                                       int workers = 1);

}  // namespace rankdiag

#endif  // RANKDIAG_EXPERIMENTS_H_
