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

// Simultaneous confidence bands and uniform (over the grid) ranking tests.

#ifndef RANKDIAG_INFERENCE_H_
#define RANKDIAG_INFERENCE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "rankdiag/bootstrap.h"
#include "rankdiag/core.h"
#include "rankdiag/estimator.h"

namespace rankdiag {

struct ConfidenceBand {
  double alpha = 0.1;
  double c_hat = 0.0;
  // c_hat / sqrt(h^d Xi); identical for every cell.
  double half_width = 0.0;
  EvalGrid grid;
  std::vector<std::vector<double>> lower;  // [point][model]
  std::vector<std::vector<double>> center;
  std::vector<std::vector<double>> upper;
};

ConfidenceBand ConfidenceBandFromSummaries(
    const ScoreField& field, const std::vector<ReplicateSummary>& summaries,
    const BootstrapConfig& cfg);
ConfidenceBand BuildConfidenceBand(const ScoreField& field,
                                   const ComparisonDataset& ds,
                                   const BootstrapConfig& cfg);

// An inf over the grid together with the grid point attaining it.
struct GridStatistic {
  double value = 0.0;
  std::size_t argmin = 0;
};

// inf_x sqrt(h^d Xi) (theta_i(x) - theta_j(x)) over grid points whose fit
// was not degenerate.
GridStatistic StatisticPair(int i, int j, const ScoreField& field);

// inf_x sqrt(h^d Xi) (theta_i(x) - theta_(K+1)(x)), theta_(K+1) being the
// (K+1)-th largest entry of theta(x).
GridStatistic StatisticTopK(int i, int k, const ScoreField& field);

enum class TestKind { kPair, kTopK };

struct TestResult {
  TestKind kind = TestKind::kPair;
  int i = 0;
  int j = 0;  // PAIR only
  int k = 0;  // TOPK only
  double statistic = 0.0;
  double critical = 0.0;
  bool reject = false;
  double alpha = 0.1;
  std::size_t argmin = 0;
  std::vector<double> argmin_point;
};

TestResult PairwiseTestFromSummaries(
    int i, int j, const ScoreField& field,
    const std::vector<ReplicateSummary>& summaries, const BootstrapConfig& cfg);
TestResult PairwiseTest(int i, int j, const ScoreField& field,
                        const ComparisonDataset& ds,
                        const BootstrapConfig& cfg);

TestResult TopKTestFromSummaries(int i, int k, const ScoreField& field,
                                 const std::vector<ReplicateSummary>& summaries,
                                 const BootstrapConfig& cfg);
TestResult TopKTest(int i, int k, const ScoreField& field,
                    const ComparisonDataset& ds, const BootstrapConfig& cfg);

}  // namespace rankdiag

#endif  // RANKDIAG_INFERENCE_H_
