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

// Kernel-smoothed, ridge-regularized local BTL likelihood and its solver.
//
// At a prompt x every comparison (i, j, X, y) receives the weight
// K_h(X - x) = h^-d prod_k K((X_k - x_k) / h) and the local loss is
//
//   1/(n^2 p L) sum_e sum_l K_h(X - x) [log(1 + e^{d}) - y d] + lambda/2 |t|^2
//
// with d = t_j - t_i. The same candidate vector t is used for every
// comparison in the window (local-constant fit), so the data term depends on
// the comparisons only through the per-edge sums of K_h and K_h * y.
// p and L are the plug-ins 2|E|/(n(n-1)) and Xi/|E|.

#ifndef RANKDIAG_ESTIMATOR_H_
#define RANKDIAG_ESTIMATOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rankdiag/core.h"

namespace rankdiag {

struct KernelSpec {
  KernelFamily family = KernelFamily::kEpanechnikov;
  double h = 0.3;
};

std::string KernelFamilyName(KernelFamily family);
KernelFamily ParseKernelFamily(const std::string& name);

// Normalized univariate kernel: 0.75 (1 - v^2) or 0.5 on |v| <= 1.
double UnivariateKernel(KernelFamily family, double v);

// h^-d prod_k K(u_k / h); zero outside the support.
double KernelWeight(const KernelSpec& spec, std::span<const double> u);

// Kernel-weighted sufficient statistics of the local likelihood at one x.
class LocalProblem {
 public:
  LocalProblem(const FlatComparisons& flat, const PlugInNormalizers& plug_ins,
               std::span<const double> x, const KernelSpec& spec,
               double lambda);

  int n() const { return n_; }
  double lambda() const { return lambda_; }
  double scale() const { return scale_; }
  bool empty() const { return edges_.empty(); }
  // Largest per-model sum of kernel weight over incident comparisons.
  double max_row_weight() const;

  double Loss(std::span<const double> theta) const;
  std::vector<double> Gradient(std::span<const double> theta) const;
  Eigen::MatrixXd Hessian(std::span<const double> theta) const;

 private:
  int n_ = 0;
  double scale_ = 0.0;
  double lambda_ = 0.0;
  std::vector<std::pair<int, int>> edges_;  // edges with positive weight
  std::vector<double> weight_;              // sum of K_h per edge
  std::vector<double> wins_;                // sum of K_h * y per edge
};

double LocalLoss(std::span<const double> theta, std::span<const double> x,
                 const ComparisonDataset& ds, const KernelSpec& spec,
                 double lambda);
std::vector<double> LocalGradient(std::span<const double> theta,
                                  std::span<const double> x,
                                  const ComparisonDataset& ds,
                                  const KernelSpec& spec, double lambda);
Eigen::MatrixXd LocalHessian(std::span<const double> theta,
                             std::span<const double> x,
                             const ComparisonDataset& ds,
                             const KernelSpec& spec, double lambda);

// (n p L / log n)^(-1/(d+4)), clamped to [0.05, 0.5].
double DefaultBandwidth(int n, double p_hat, double l_bar, int d);

// (1/n) (h^2 + sqrt(max(log(n h^(d/2-1)), 1) / (n p L h^d))).
double DefaultLambda(int n, double p_hat, double l_bar, double h, int d);

// Estimator settings with h and lambda chosen from the dataset's plug-ins.
EstimatorConfig DefaultEstimatorConfig(const ComparisonDataset& ds);

struct FitDiagnostics {
  int iters = 0;
  double gnorm = 0.0;
  bool converged = false;
  // No comparison carried positive kernel weight at this point.
  bool degenerate = false;
  // Loss at every accepted iterate, when requested by the config.
  std::vector<double> loss_trace;
};

struct PointFit {
  std::vector<double> theta;
  FitDiagnostics diag;
};

// Gradient descent from theta = 0 until |grad|_inf <= grad_tol or max_iters.
// The step defaults to 1/(lambda + max_row_weight * scale / 2), an upper
// bound on the Hessian's spectral norm, and is halved if a step ever
// increases the loss. The result is re-centered to sum zero.
PointFit FitLocal(const LocalProblem& problem, const EstimatorConfig& cfg);
PointFit FitAt(std::span<const double> x, const ComparisonDataset& ds,
               const EstimatorConfig& cfg);

struct ScoreField {
  EvalGrid grid;
  KernelSpec kernel;
  double lambda = 0.0;
  // Effective sample size of the dataset the field was fitted on.
  std::int64_t xi = 0;
  std::vector<std::vector<double>> theta;  // [grid point][model]
  std::vector<FitDiagnostics> diag;
  std::vector<std::string> warnings;

  int n() const { return theta.empty() ? 0 : static_cast<int>(theta[0].size()); }
  // sqrt(h^d Xi), the scaling shared by every T- and W-type statistic.
  double root_scale() const;
  std::size_t degenerate_count() const;
  std::size_t unconverged_count() const;
};

ScoreField FitField(const EvalGrid& grid, const ComparisonDataset& ds,
                    const EstimatorConfig& cfg, int workers = 1);

}  // namespace rankdiag

#endif  // RANKDIAG_ESTIMATOR_H_
