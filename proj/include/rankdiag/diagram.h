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

// Confidence diagrams: a step-down family of uniform pairwise tests whose
// rejections form a strict partial order, reported as a Hasse diagram.
//
// A pair (k, i) always reads "model k ranks strictly above model i at every
// grid point".

#ifndef RANKDIAG_DIAGRAM_H_
#define RANKDIAG_DIAGRAM_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rankdiag/bootstrap.h"
#include "rankdiag/core.h"
#include "rankdiag/estimator.h"
#include "rankdiag/simulator.h"

namespace rankdiag {

using OrderPairs = std::vector<std::pair<int, int>>;

struct StepDownIteration {
  double critical = 0.0;
  OrderPairs newly_rejected;
};

struct ConfidenceDiagram {
  int n = 0;
  double alpha = 0.1;
  OrderPairs rejected;     // ascending
  std::vector<int> levels;  // 1 = bottom
  OrderPairs hasse_edges;  // ascending
  std::vector<StepDownIteration> iterations;
};

// closure[a][b] is true iff a is above b. Throws CycleDetected.
std::vector<std::vector<bool>> TransitiveClosure(const OrderPairs& pairs,
                                                 int n);

// Unique minimal edge set with the same transitive closure.
OrderPairs TransitiveReduction(const OrderPairs& pairs, int n);

// Longest-path depth: models with nothing below them are level 1, otherwise
// one more than the highest level they dominate.
std::vector<int> AssignLevels(const OrderPairs& pairs, int n);

ConfidenceDiagram DiagramFromSummaries(
    const ScoreField& field, const std::vector<ReplicateSummary>& summaries,
    const BootstrapConfig& cfg);
ConfidenceDiagram BuildDiagram(const ScoreField& field,
                               const ComparisonDataset& ds,
                               const BootstrapConfig& cfg);

// Assembles a diagram from a given rejected set (levels and Hasse edges
// derived, no audit trail).
ConfidenceDiagram DiagramFromRelation(const OrderPairs& rejected, int n,
                                      double alpha);

struct RankRange {
  int min_rank = 1;  // 1 = best
  int max_rank = 1;
};
std::vector<RankRange> PossibleRanks(const ConfidenceDiagram& diagram);

// order lists 0-based model ids from best to worst. Throws NotAPermutation.
bool IsLinearExtension(const ConfidenceDiagram& diagram,
                       std::span<const int> order);

// Monte-Carlo frequency with which each rank falls inside each model's
// possible-rank range. Replication r simulates with a seed derived from
// (sim.seed, r); the truth must induce a fixed order of the models.
struct HeatmapConfig {
  SimulationConfig sim;
  int grid_resolution = 5;
  int replications = 50;
  BootstrapConfig bootstrap;
};

struct RankHeatmap {
  // freq[i][r]: fraction of replications with rank r + 1 in model i's range.
  std::vector<std::vector<double>> freq;
  std::vector<int> true_rank;  // 1-based
  int replications = 0;
};
RankHeatmap RankFrequencyHeatmap(const HeatmapConfig& cfg);

}  // namespace rankdiag

#endif  // RANKDIAG_DIAGRAM_H_
