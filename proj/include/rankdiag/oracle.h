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

// Brute-force references kept deliberately apart from the estimator code.

#ifndef RANKDIAG_ORACLE_H_
#define RANKDIAG_ORACLE_H_

#include <span>
#include <vector>

#include "rankdiag/core.h"
#include "rankdiag/estimator.h"

namespace rankdiag {

// Context-free ridge BTL MLE over every comparison with unit weight:
//
//   minimize sum_k [log(1 + e^{t_j - t_i}) - y_k (t_j - t_i)] + ridge/2 |t|^2
//
// by damped Newton until |grad|_inf <= 1e-10. Output is centered. Throws
// NotConverged after max_iters Newton steps.
std::vector<double> PooledBtlMle(const ComparisonDataset& ds,
                                 double ridge = 1e-8, int max_iters = 500);

// Central differences of LocalLoss, one coordinate at a time.
std::vector<double> FiniteDiffGradient(std::span<const double> theta,
                                       std::span<const double> x,
                                       const ComparisonDataset& ds,
                                       const KernelSpec& spec, double lambda,
                                       double step);

}  // namespace rankdiag

#endif  // RANKDIAG_ORACLE_H_
