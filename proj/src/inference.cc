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

#include "rankdiag/inference.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rankdiag/error.h"

namespace rankdiag {
namespace {

void CheckModel(int m, int n) {
  if (m < 0 || m >= n) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "model index " + std::to_string(m + 1) + " outside 1.." +
                    std::to_string(n));
  }
}

// min over non-degenerate grid points of root_scale * gap(point).
template <typename Gap>
GridStatistic MinOverGrid(const ScoreField& field, const Gap& gap) {
  GridStatistic best;
  best.value = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t g = 0; g < field.theta.size(); ++g) {
    if (field.diag[g].degenerate) continue;
    const double v = field.root_scale() * gap(field.theta[g]);
    if (!any || v < best.value) {
      best.value = v;
      best.argmin = g;
      any = true;
    }
  }
  if (!any) {
    throw Error(ErrorCode::kAllWindowsEmpty,
                "every grid point of the score field is degenerate");
  }
  return best;
}

}  // namespace

ConfidenceBand ConfidenceBandFromSummaries(
    const ScoreField& field, const std::vector<ReplicateSummary>& summaries,
    const BootstrapConfig& cfg) {
  const BootstrapDraws draws =
      DrawSup(Functional::Band(), summaries, cfg, field.n());
  ConfidenceBand band;
  band.alpha = cfg.alpha;
  band.c_hat = EmpiricalQuantile(draws, 1.0 - cfg.alpha);
  band.half_width = band.c_hat / field.root_scale();
  band.grid = field.grid;
  band.center = field.theta;
  band.lower = field.theta;
  band.upper = field.theta;
  for (std::size_t g = 0; g < field.theta.size(); ++g) {
    for (std::size_t m = 0; m < field.theta[g].size(); ++m) {
      band.lower[g][m] -= band.half_width;
      band.upper[g][m] += band.half_width;
    }
  }
  return band;
}

ConfidenceBand BuildConfidenceBand(const ScoreField& field,
                                   const ComparisonDataset& ds,
                                   const BootstrapConfig& cfg) {
  return ConfidenceBandFromSummaries(
      field, MultiplierBootstrap(field, ds).Run(cfg), cfg);
}

GridStatistic StatisticPair(int i, int j, const ScoreField& field) {
  CheckModel(i, field.n());
  CheckModel(j, field.n());
  if (i == j) throw Error(ErrorCode::kIndexOutOfRange, "pair needs i != j");
  return MinOverGrid(field, [i, j](const std::vector<double>& t) {
    return t[i] - t[j];
  });
}

GridStatistic StatisticTopK(int i, int k, const ScoreField& field) {
  const int n = field.n();
  CheckModel(i, n);
  if (k < 1 || k > n - 1) {
    throw Error(ErrorCode::kBadK, "K must lie in 1.." + std::to_string(n - 1) +
                                      ", got " + std::to_string(k));
  }
  std::vector<double> scratch(n);
  return MinOverGrid(field, [&](const std::vector<double>& t) {
    scratch.assign(t.begin(), t.end());
    std::nth_element(scratch.begin(), scratch.begin() + k, scratch.end(),
                     std::greater<double>());
    return t[i] - scratch[k];
  });
}

TestResult PairwiseTestFromSummaries(
    int i, int j, const ScoreField& field,
    const std::vector<ReplicateSummary>& summaries,
    const BootstrapConfig& cfg) {
  const GridStatistic stat = StatisticPair(i, j, field);
  const BootstrapDraws draws =
      DrawSup(Functional::Pair(i, j), summaries, cfg, field.n());
  TestResult result;
  result.kind = TestKind::kPair;
  result.i = i;
  result.j = j;
  result.alpha = cfg.alpha;
  result.statistic = stat.value;
  result.argmin = stat.argmin;
  result.argmin_point = field.grid.point(stat.argmin);
  result.critical = EmpiricalQuantile(draws, 1.0 - cfg.alpha);
  result.reject = result.statistic > result.critical;
  return result;
}

TestResult PairwiseTest(int i, int j, const ScoreField& field,
                        const ComparisonDataset& ds,
                        const BootstrapConfig& cfg) {
  StatisticPair(i, j, field);  // index checks before the bootstrap runs
  return PairwiseTestFromSummaries(
      i, j, field, MultiplierBootstrap(field, ds).Run(cfg), cfg);
}

TestResult TopKTestFromSummaries(int i, int k, const ScoreField& field,
                                 const std::vector<ReplicateSummary>& summaries,
                                 const BootstrapConfig& cfg) {
  const GridStatistic stat = StatisticTopK(i, k, field);
  const BootstrapDraws draws =
      DrawSup(Functional::TopK(i), summaries, cfg, field.n());
  TestResult result;
  result.kind = TestKind::kTopK;
  result.i = i;
  result.k = k;
  result.alpha = cfg.alpha;
  result.statistic = stat.value;
  result.argmin = stat.argmin;
  result.argmin_point = field.grid.point(stat.argmin);
  result.critical = EmpiricalQuantile(draws, 1.0 - cfg.alpha);
  result.reject = result.statistic > result.critical;
  return result;
}

TestResult TopKTest(int i, int k, const ScoreField& field,
                    const ComparisonDataset& ds, const BootstrapConfig& cfg) {
  StatisticTopK(i, k, field);
  return TopKTestFromSummaries(
      i, k, field, MultiplierBootstrap(field, ds).Run(cfg), cfg);
}

}  // namespace rankdiag
