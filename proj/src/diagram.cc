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

#include "rankdiag/diagram.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rankdiag/error.h"
#include "rankdiag/inference.h"
#include "rankdiag/random.h"

namespace rankdiag {
namespace {

void CheckPairs(const OrderPairs& pairs, int n) {
  for (const auto& [a, b] : pairs) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "order pair (" + std::to_string(a + 1) + ", " +
                      std::to_string(b + 1) + ") outside 1.." +
                      std::to_string(n));
    }
    if (a == b) {
      throw Error(ErrorCode::kCycleDetected,
                  "model " + std::to_string(a + 1) + " placed above itself");
    }
  }
}

}  // namespace

std::vector<std::vector<bool>> TransitiveClosure(const OrderPairs& pairs,
                                                 int n) {
  CheckPairs(pairs, n);
  std::vector<std::vector<bool>> above(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : pairs) above[a][b] = true;
  for (int via = 0; via < n; ++via) {
    for (int a = 0; a < n; ++a) {
      if (!above[a][via]) continue;
      for (int b = 0; b < n; ++b) {
        if (above[via][b]) above[a][b] = true;
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    if (above[a][a]) {
      throw Error(ErrorCode::kCycleDetected,
                  "order relation has a cycle through model " +
                      std::to_string(a + 1));
    }
  }
  return above;
}

OrderPairs TransitiveReduction(const OrderPairs& pairs, int n) {
  const std::vector<std::vector<bool>> above = TransitiveClosure(pairs, n);
  OrderPairs out;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (!above[a][b]) continue;
      bool implied = false;
      for (int c = 0; c < n && !implied; ++c) {
        implied = above[a][c] && above[c][b];
      }
      if (!implied) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<int> AssignLevels(const OrderPairs& pairs, int n) {
  const std::vector<std::vector<bool>> above = TransitiveClosure(pairs, n);
  std::vector<int> level(n, 0);
  std::function<int(int)> depth = [&](int a) {
    if (level[a] > 0) return level[a];
    int best = 1;
    for (int b = 0; b < n; ++b) {
      if (above[a][b]) best = std::max(best, depth(b) + 1);
    }
    level[a] = best;
    return best;
  };
  for (int a = 0; a < n; ++a) depth(a);
  return level;
}

ConfidenceDiagram DiagramFromRelation(const OrderPairs& rejected, int n,
                                      double alpha) {
  ConfidenceDiagram diagram;
  diagram.n = n;
  diagram.alpha = alpha;
  diagram.rejected = rejected;
  std::sort(diagram.rejected.begin(), diagram.rejected.end());
  diagram.rejected.erase(
      std::unique(diagram.rejected.begin(), diagram.rejected.end()),
      diagram.rejected.end());
  diagram.levels = AssignLevels(diagram.rejected, n);
  diagram.hasse_edges = TransitiveReduction(diagram.rejected, n);
  return diagram;
}

ConfidenceDiagram DiagramFromSummaries(
    const ScoreField& field, const std::vector<ReplicateSummary>& summaries,
    const BootstrapConfig& cfg) {
  const int n = field.n();
  std::vector<std::vector<double>> stat(n, std::vector<double>(n, 0.0));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (k != i) stat[k][i] = StatisticPair(k, i, field).value;
    }
  }

  // A pair with no grid point where both models carry curvature has no
  // bootstrap law; it stays untested.
  std::vector<std::vector<bool>> rejected(n, std::vector<bool>(n, false));
  std::vector<std::vector<bool>> testable(n, std::vector<bool>(n, true));
  if (!summaries.empty()) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        testable[k][i] = std::isfinite(
            summaries[0].pair[static_cast<std::size_t>(k) * n + i]);
      }
    }
  }
  OrderPairs all_rejected;
  std::vector<StepDownIteration> iterations;
  for (;;) {
    OrderPairs active;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        if (k != i && testable[k][i] && !rejected[k][i]) {
          active.emplace_back(k, i);
        }
      }
    }
    if (active.empty()) break;
    const BootstrapDraws draws =
        DrawSup(Functional::Diagram(active), summaries, cfg, n);
    StepDownIteration iteration;
    iteration.critical = EmpiricalQuantile(draws, 1.0 - cfg.alpha);
    for (const auto& [k, i] : active) {
      if (stat[k][i] > iteration.critical) {
        iteration.newly_rejected.emplace_back(k, i);
      }
    }
    const bool done = iteration.newly_rejected.empty();
    for (const auto& [k, i] : iteration.newly_rejected) {
      rejected[k][i] = true;
      all_rejected.emplace_back(k, i);
    }
    iterations.push_back(std::move(iteration));
    if (done) break;
  }

  ConfidenceDiagram diagram = DiagramFromRelation(all_rejected, n, cfg.alpha);
  diagram.iterations = std::move(iterations);
  return diagram;
}

ConfidenceDiagram BuildDiagram(const ScoreField& field,
                               const ComparisonDataset& ds,
                               const BootstrapConfig& cfg) {
  return DiagramFromSummaries(field, MultiplierBootstrap(field, ds).Run(cfg),
                              cfg);
}

std::vector<RankRange> PossibleRanks(const ConfidenceDiagram& diagram) {
  const int n = diagram.n;
  const std::vector<std::vector<bool>> above =
      TransitiveClosure(diagram.rejected, n);
  std::vector<RankRange> ranks(n);
  for (int i = 0; i < n; ++i) {
    int better = 0;
    int worse = 0;
    for (int k = 0; k < n; ++k) {
      if (above[k][i]) ++better;
      if (above[i][k]) ++worse;
    }
    ranks[i].min_rank = 1 + better;
    ranks[i].max_rank = n - worse;
  }
  return ranks;
}

bool IsLinearExtension(const ConfidenceDiagram& diagram,
                       std::span<const int> order) {
  const int n = diagram.n;
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::kNotAPermutation,
                "order has " + std::to_string(order.size()) +
                    " entries, expected " + std::to_string(n));
  }
  std::vector<int> position(n, -1);
  for (int pos = 0; pos < n; ++pos) {
    const int m = order[pos];
    if (m < 0 || m >= n || position[m] != -1) {
      throw Error(ErrorCode::kNotAPermutation,
                  "order is not a permutation of the models");
    }
    position[m] = pos;
  }
  // Checking the generating pairs suffices: precedence is transitive.
  for (const auto& [k, i] : diagram.rejected) {
    if (position[k] > position[i]) return false;
  }
  return true;
}

RankHeatmap RankFrequencyHeatmap(const HeatmapConfig& cfg) {
  ValidateSimulationConfig(cfg.sim);
  if (cfg.replications < 1) {
    throw Error(ErrorCode::kInvalidConfig, "replications must be >= 1");
  }
  const int n = cfg.sim.n;
  const EvalGrid grid =
      MakeGrid(GridSpec::Lattice(cfg.grid_resolution), cfg.sim.d);
  const std::vector<int> order = TrueOrder(cfg.sim.score, n, grid);

  RankHeatmap heatmap;
  heatmap.replications = cfg.replications;
  heatmap.true_rank.assign(n, 0);
  for (int pos = 0; pos < n; ++pos) heatmap.true_rank[order[pos]] = pos + 1;
  std::vector<std::vector<int>> hits(n, std::vector<int>(n, 0));

  for (int r = 0; r < cfg.replications; ++r) {
    SimulationConfig sim = cfg.sim;
    sim.seed = DeriveSeed(cfg.sim.seed, StreamTag::kReplication,
                          {static_cast<std::uint64_t>(r)});
    const ComparisonDataset ds = SampleDataset(sim);
    const ScoreField field =
        FitField(grid, ds, DefaultEstimatorConfig(ds), cfg.bootstrap.workers);
    BootstrapConfig boot = cfg.bootstrap;
    boot.seed = DeriveSeed(sim.seed, StreamTag::kMultiplier, {});
    const std::vector<RankRange> ranks =
        PossibleRanks(BuildDiagram(field, ds, boot));
    for (int i = 0; i < n; ++i) {
      for (int rank = ranks[i].min_rank; rank <= ranks[i].max_rank; ++rank) {
        ++hits[i][rank - 1];
      }
    }
  }
  heatmap.freq.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int rank = 0; rank < n; ++rank) {
      heatmap.freq[i][rank] =
          static_cast<double>(hits[i][rank]) / cfg.replications;
    }
  }
  return heatmap;
}

}  // namespace rankdiag
