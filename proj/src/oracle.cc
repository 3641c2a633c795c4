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

#include "rankdiag/oracle.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankdiag/error.h"

namespace rankdiag {
namespace {

double Sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double Softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double PooledObjective(const ComparisonDataset& ds, const Eigen::VectorXd& t,
                       double ridge) {
  double total = 0.5 * ridge * t.squaredNorm();
  for (const Edge& e : ds.edges) {
    const double delta = t(e.j) - t(e.i);
    for (const Comparison& c : e.comparisons) {
      total += Softplus(delta) - c.y * delta;
    }
  }
  return total;
}

}  // namespace

std::vector<double> PooledBtlMle(const ComparisonDataset& ds, double ridge,
                                 int max_iters) {
  ValidateDataset(ds);
  const int n = ds.n;
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
  for (int iter = 0; iter <= max_iters; ++iter) {
    Eigen::VectorXd g = ridge * t;
    Eigen::MatrixXd h = ridge * Eigen::MatrixXd::Identity(n, n);
    for (const Edge& e : ds.edges) {
      const double p = Sigmoid(t(e.j) - t(e.i));
      double wins = 0.0;
      for (const Comparison& c : e.comparisons) wins += c.y;
      const double count = static_cast<double>(e.comparisons.size());
      const double r = count * p - wins;
      g(e.j) += r;
      g(e.i) -= r;
      const double c = count * p * (1.0 - p);
      h(e.i, e.i) += c;
      h(e.j, e.j) += c;
      h(e.i, e.j) -= c;
      h(e.j, e.i) -= c;
    }
    if (g.lpNorm<Eigen::Infinity>() <= 1e-10) {
      const double mean = t.mean();
      std::vector<double> out(n);
      for (int m = 0; m < n; ++m) out[m] = t(m) - mean;
      return out;
    }
    if (iter == max_iters) break;
    // The added rank-one term only acts along the all-ones direction, which
    // the gradient never has a component in once t is centered.
    const Eigen::VectorXd step = (h + ones / n).ldlt().solve(-g);
    const double f0 = PooledObjective(ds, t, ridge);
    double a = 1.0;
    Eigen::VectorXd next = t + step;
    const double slack = 1e-13 * std::abs(f0);
    while (PooledObjective(ds, next, ridge) >
               f0 + 1e-4 * a * g.dot(step) + slack &&
           a > 1e-12) {
      a *= 0.5;
      next = t + a * step;
    }
    t = next;
    t.array() -= t.mean();
  }
  throw Error(ErrorCode::kNotConverged,
              "pooled MLE did not reach |grad| <= 1e-10 in " +
                  std::to_string(max_iters) + " Newton steps");
}

std::vector<double> FiniteDiffGradient(std::span<const double> theta,
                                       std::span<const double> x,
                                       const ComparisonDataset& ds,
                                       const KernelSpec& spec, double lambda,
                                       double step) {
  if (!(step > 0)) {
    throw Error(ErrorCode::kInvalidConfig, "finite-difference step must be > 0");
  }
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  for (std::size_t m = 0; m < theta.size(); ++m) {
    probe[m] = theta[m] + step;
    const double up = LocalLoss(probe, x, ds, spec, lambda);
    probe[m] = theta[m] - step;
    const double down = LocalLoss(probe, x, ds, spec, lambda);
    probe[m] = theta[m];
    grad[m] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace rankdiag
