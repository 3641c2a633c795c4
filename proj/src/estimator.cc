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

#include "rankdiag/estimator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rankdiag/error.h"
#include "rankdiag/parallel.h"

namespace rankdiag {
namespace {

// log(1 + e^t) without overflow.
double Softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double MaxAbs(std::span<const double> v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

void CheckDims(std::span<const double> theta, std::span<const double> x,
               const ComparisonDataset& ds) {
  if (static_cast<int>(theta.size()) != ds.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta has length " + std::to_string(theta.size()) +
                    ", expected n = " + std::to_string(ds.n));
  }
  if (static_cast<int>(x.size()) != ds.d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "prompt has length " + std::to_string(x.size()) +
                    ", expected d = " + std::to_string(ds.d));
  }
}

}  // namespace

std::string KernelFamilyName(KernelFamily family) {
  return family == KernelFamily::kEpanechnikov ? "epanechnikov" : "uniform";
}

KernelFamily ParseKernelFamily(const std::string& name) {
  if (name == "epanechnikov") return KernelFamily::kEpanechnikov;
  if (name == "uniform") return KernelFamily::kUniformBox;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown kernel '" + name + "' (expected epanechnikov or uniform)");
}

double UnivariateKernel(KernelFamily family, double v) {
  if (std::abs(v) > 1.0) return 0.0;
  return family == KernelFamily::kEpanechnikov ? 0.75 * (1.0 - v * v) : 0.5;
}

double KernelWeight(const KernelSpec& spec, std::span<const double> u) {
  double w = 1.0;
  for (double uk : u) {
    const double k = UnivariateKernel(spec.family, uk / spec.h);
    if (k == 0.0) return 0.0;
    w *= k / spec.h;
  }
  return w;
}

LocalProblem::LocalProblem(const FlatComparisons& flat,
                           const PlugInNormalizers& plug_ins,
                           std::span<const double> x, const KernelSpec& spec,
                           double lambda)
    : n_(flat.n), lambda_(lambda) {
  scale_ = 1.0 / (static_cast<double>(flat.n) * flat.n * plug_ins.p_hat *
                  plug_ins.l_bar);
  std::vector<double> weight(flat.edges.size(), 0.0);
  std::vector<double> wins(flat.edges.size(), 0.0);
  std::vector<double> u(flat.d);
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const std::span<const double> prompt = flat.prompt(k);
    for (int c = 0; c < flat.d; ++c) u[c] = prompt[c] - x[c];
    const double w = KernelWeight(spec, u);
    if (w == 0.0) continue;
    weight[flat.edge_of[k]] += w;
    if (flat.y[k]) wins[flat.edge_of[k]] += w;
  }
  for (std::size_t e = 0; e < flat.edges.size(); ++e) {
    if (weight[e] > 0.0) {
      edges_.push_back(flat.edges[e]);
      weight_.push_back(weight[e]);
      wins_.push_back(wins[e]);
    }
  }
}

double LocalProblem::max_row_weight() const {
  std::vector<double> row(n_, 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    row[edges_[e].first] += weight_[e];
    row[edges_[e].second] += weight_[e];
  }
  return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
}

double LocalProblem::Loss(std::span<const double> theta) const {
  double data = 0.0;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const double diff = theta[edges_[e].second] - theta[edges_[e].first];
    data += weight_[e] * Softplus(diff) - wins_[e] * diff;
  }
  double ridge = 0.0;
  for (double t : theta) ridge += t * t;
  return scale_ * data + 0.5 * lambda_ * ridge;
}

std::vector<double> LocalProblem::Gradient(
    std::span<const double> theta) const {
  std::vector<double> grad(n_, 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    const double r = weight_[e] * Logistic(theta[j] - theta[i]) - wins_[e];
    grad[j] += r;
    grad[i] -= r;
  }
  for (int m = 0; m < n_; ++m) grad[m] = scale_ * grad[m] + lambda_ * theta[m];
  return grad;
}

Eigen::MatrixXd LocalProblem::Hessian(std::span<const double> theta) const {
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    const double psi = Logistic(theta[j] - theta[i]);
    const double c = scale_ * weight_[e] * psi * (1.0 - psi);
    hess(i, i) += c;
    hess(j, j) += c;
    hess(i, j) -= c;
    hess(j, i) -= c;
  }
  hess.diagonal().array() += lambda_;
  return hess;
}

double LocalLoss(std::span<const double> theta, std::span<const double> x,
                 const ComparisonDataset& ds, const KernelSpec& spec,
                 double lambda) {
  CheckDims(theta, x, ds);
  return LocalProblem(Flatten(ds), ComputePlugIns(ds), x, spec, lambda)
      .Loss(theta);
}

std::vector<double> LocalGradient(std::span<const double> theta,
                                  std::span<const double> x,
                                  const ComparisonDataset& ds,
                                  const KernelSpec& spec, double lambda) {
  CheckDims(theta, x, ds);
  return LocalProblem(Flatten(ds), ComputePlugIns(ds), x, spec, lambda)
      .Gradient(theta);
}

Eigen::MatrixXd LocalHessian(std::span<const double> theta,
                             std::span<const double> x,
                             const ComparisonDataset& ds,
                             const KernelSpec& spec, double lambda) {
  CheckDims(theta, x, ds);
  return LocalProblem(Flatten(ds), ComputePlugIns(ds), x, spec, lambda)
      .Hessian(theta);
}

double DefaultBandwidth(int n, double p_hat, double l_bar, int d) {
  if (n < 2 || !(p_hat * l_bar > 0.0)) {
    throw Error(ErrorCode::kDegenerateInput,
                "default bandwidth needs n >= 2 and p_hat * L_bar > 0");
  }
  const double npl = n * p_hat * l_bar;
  const double h = std::pow(npl / std::log(static_cast<double>(n)),
                            -1.0 / (d + 4.0));
  return std::clamp(h, 0.05, 0.5);
}

double DefaultLambda(int n, double p_hat, double l_bar, double h, int d) {
  if (!(h > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "bandwidth must be > 0");
  }
  const double log_term =
      std::max(std::log(n * std::pow(h, d / 2.0 - 1.0)), 1.0);
  const double variance =
      std::sqrt(log_term / (n * p_hat * l_bar * std::pow(h, d)));
  return (h * h + variance) / n;
}

EstimatorConfig DefaultEstimatorConfig(const ComparisonDataset& ds) {
  const PlugInNormalizers plug = ComputePlugIns(ds);
  EstimatorConfig cfg;
  cfg.h = DefaultBandwidth(ds.n, plug.p_hat, plug.l_bar, ds.d);
  cfg.lambda = DefaultLambda(ds.n, plug.p_hat, plug.l_bar, cfg.h, ds.d);
  return cfg;
}

PointFit FitLocal(const LocalProblem& problem, const EstimatorConfig& cfg) {
  ValidateEstimatorConfig(cfg);
  PointFit fit;
  fit.theta.assign(problem.n(), 0.0);
  if (problem.empty()) {
    fit.diag.degenerate = true;
    fit.diag.gnorm = 0.0;
    return fit;
  }

  double eta = cfg.eta;
  if (eta == 0.0) {
    // psi' <= 1/4 and the weighted Laplacian's spectral norm is at most twice
    // its largest row sum.
    eta = 1.0 / (problem.lambda() +
                 0.5 * problem.max_row_weight() * problem.scale());
  }

  std::vector<double>& theta = fit.theta;
  std::vector<double> candidate(theta.size());
  double loss = problem.Loss(theta);
  if (cfg.record_loss_trace) fit.diag.loss_trace.push_back(loss);
  int iter = 0;
  std::vector<double> grad = problem.Gradient(theta);
  double gnorm = MaxAbs(grad);
  while (gnorm > cfg.grad_tol && iter < cfg.max_iters) {
    ++iter;
    for (std::size_t m = 0; m < theta.size(); ++m) {
      candidate[m] = theta[m] - eta * grad[m];
    }
    const double next_loss = problem.Loss(candidate);
    if (next_loss > loss + 1e-14 * std::abs(loss)) {
      eta *= 0.5;
      continue;
    }
    theta.swap(candidate);
    loss = next_loss;
    if (cfg.record_loss_trace) fit.diag.loss_trace.push_back(loss);
    grad = problem.Gradient(theta);
    gnorm = MaxAbs(grad);
  }
  fit.diag.iters = iter;
  fit.diag.gnorm = gnorm;
  fit.diag.converged = gnorm <= cfg.grad_tol;

  const double mean =
      std::accumulate(theta.begin(), theta.end(), 0.0) / theta.size();
  for (double& t : theta) t -= mean;
  return fit;
}

PointFit FitAt(std::span<const double> x, const ComparisonDataset& ds,
               const EstimatorConfig& cfg) {
  if (static_cast<int>(x.size()) != ds.d) {
    throw Error(ErrorCode::kDimensionMismatch, "prompt dimension mismatch");
  }
  const KernelSpec spec{cfg.kernel, cfg.h};
  return FitLocal(LocalProblem(Flatten(ds), ComputePlugIns(ds), x, spec,
                               cfg.lambda),
                  cfg);
}

double ScoreField::root_scale() const {
  return std::sqrt(std::pow(kernel.h, grid.dim()) * static_cast<double>(xi));
}

std::size_t ScoreField::degenerate_count() const {
  return std::count_if(diag.begin(), diag.end(),
                       [](const FitDiagnostics& d) { return d.degenerate; });
}

std::size_t ScoreField::unconverged_count() const {
  return std::count_if(diag.begin(), diag.end(), [](const FitDiagnostics& d) {
    return !d.degenerate && !d.converged;
  });
}

ScoreField FitField(const EvalGrid& grid, const ComparisonDataset& ds,
                    const EstimatorConfig& cfg, int workers) {
  ValidateEstimatorConfig(cfg);
  if (grid.size() == 0) throw Error(ErrorCode::kEmptyGrid, "grid is empty");
  if (grid.dim() != ds.d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "grid dimension " + std::to_string(grid.dim()) +
                    " does not match dataset d = " + std::to_string(ds.d));
  }
  const FlatComparisons flat = Flatten(ds);
  const PlugInNormalizers plug = ComputePlugIns(ds);

  ScoreField field;
  field.grid = grid;
  field.kernel = KernelSpec{cfg.kernel, cfg.h};
  field.lambda = cfg.lambda;
  field.xi = EffectiveSampleSize(ds);
  field.theta.resize(grid.size());
  field.diag.resize(grid.size());
  ParallelFor(grid.size(), workers, [&](std::size_t g) {
    PointFit fit = FitLocal(
        LocalProblem(flat, plug, grid.point(g), field.kernel, cfg.lambda), cfg);
    field.theta[g] = std::move(fit.theta);
    field.diag[g] = std::move(fit.diag);
  });

  if (plug.l_bar * std::pow(cfg.h, ds.d) < 1.0) {
    std::ostringstream msg;
    msg << "L_bar * h^d = " << plug.l_bar * std::pow(cfg.h, ds.d)
        << " < 1: few comparisons per kernel window";
    field.warnings.push_back(msg.str());
  }
  if (const std::size_t bad = field.degenerate_count(); bad > 0) {
    field.warnings.push_back(std::to_string(bad) +
                             " grid point(s) have no data in the kernel window");
  }
  if (const std::size_t bad = field.unconverged_count(); bad > 0) {
    field.warnings.push_back(std::to_string(bad) +
                             " grid point(s) hit max_iters before grad_tol");
  }
  return field;
}

}  // namespace rankdiag
