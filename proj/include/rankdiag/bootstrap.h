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

// Gaussian multiplier bootstrap for sup-functionals of the score field.
//
// For model m at grid point x, with comparisons k = (i, j, X, y) and
// theta-hat looked up at the grid point nearest to X:
//
//   Vbar_m(x) = 1/(n p L) sum_{k touches m} K_h(X - x) psi'(t_j - t_i)
//   Gbar_m(x) = 1/(n p L) sum_{k touches m} s_mk xi_k K_h(X - x)
//                                          (psi(t_j - t_i) - y)
//   W_m(x)    = -sqrt(h^d Xi) Gbar_m(x) / Vbar_m(x)
//
// where s_mk is +1 if m == j and -1 if m == i, matching the orientation of
// the local gradient. Cells with Vbar_m(x) == 0 are invalid and never enter
// a sup.

#ifndef RANKDIAG_BOOTSTRAP_H_
#define RANKDIAG_BOOTSTRAP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankdiag/core.h"
#include "rankdiag/estimator.h"

namespace rankdiag {

// One standard-normal multiplier per comparison, in FlatComparisons order.
struct MultiplierDraw {
  std::vector<double> xi;

  // Replicate b of a bootstrap with the given seed. The stream depends only
  // on (seed, b), never on which worker draws it.
  static MultiplierDraw Generate(std::size_t count, std::uint64_t seed,
                                 int replicate);
};

double Vbar(int model, std::span<const double> x, const ScoreField& field,
            const ComparisonDataset& ds, const KernelSpec& spec);
double Gbar(int model, std::span<const double> x, const ScoreField& field,
            const ComparisonDataset& ds, const KernelSpec& spec,
            const MultiplierDraw& draw);

// W_m(x) over (model, grid point).
struct WMatrix {
  int n = 0;
  std::size_t points = 0;
  std::vector<double> values;  // [point * n + model]
  std::vector<std::uint8_t> valid;

  double at(int model, std::size_t point) const {
    return values[point * n + model];
  }
  bool is_valid(int model, std::size_t point) const {
    return valid[point * n + model] != 0;
  }
};

enum class FunctionalKind { kBand, kPair, kTopK, kDiagram };

// The sup-statistic whose conditional law is being resampled.
//   BAND:        sup_{m, x} |W_m(x)|
//   PAIR(i,j):   sup_x [W_i(x) - W_j(x)]
//   TOPK(i):     sup_{j != i, x} [W_i(x) - W_j(x)]
//   DIAGRAM(S):  sup_{(i,j) in S, x} [W_i(x) - W_j(x)]
struct Functional {
  FunctionalKind kind = FunctionalKind::kBand;
  int i = 0;
  int j = 0;
  std::vector<std::pair<int, int>> active;

  static Functional Band();
  static Functional Pair(int i, int j);
  static Functional TopK(int i);
  static Functional Diagram(std::vector<std::pair<int, int>> active);

  std::string Describe() const;  // 1-based, e.g. "PAIR(3,1)"
};

struct BootstrapDraws {
  Functional functional;
  BootstrapConfig config;
  std::vector<double> samples;
};

// Everything a single replicate contributes to any functional: the band sup
// and sup_x [W_i(x) - W_j(x)] for every ordered pair (-inf when the pair has
// no common valid cell).
struct ReplicateSummary {
  double band = 0.0;
  std::vector<double> pair;  // [i * n + j]
};

// Precomputes, per grid point, the kernel-weighted residual and curvature
// terms so each replicate costs one pass over the in-window comparisons.
class MultiplierBootstrap {
 public:
  MultiplierBootstrap(const ScoreField& field, const ComparisonDataset& ds);

  int n() const { return n_; }
  std::size_t points() const { return points_; }
  std::size_t comparisons() const { return comparisons_; }
  // sqrt(h^d Xi).
  double root_scale() const { return root_scale_; }
  double vbar(int model, std::size_t point) const {
    return vbar_[point * n_ + model];
  }

  WMatrix W(const MultiplierDraw& draw) const;
  ReplicateSummary Summarize(const WMatrix& w) const;

  // Summaries for replicates 0..B-1, ordered by replicate index.
  std::vector<ReplicateSummary> Run(const BootstrapConfig& cfg) const;

 private:
  struct Term {
    std::uint32_t comparison;
    std::uint32_t i;
    std::uint32_t j;
    double coef;  // K_h * (psi - y) / (n p L)
  };

  int n_ = 0;
  std::size_t points_ = 0;
  std::size_t comparisons_ = 0;
  double root_scale_ = 0.0;
  std::vector<std::vector<Term>> terms_;  // per grid point
  std::vector<double> vbar_;              // [point * n + model]
};

WMatrix WProcess(const ScoreField& field, const ComparisonDataset& ds,
                 const MultiplierDraw& draw);

// Samples of one functional taken from precomputed replicate summaries.
BootstrapDraws DrawSup(const Functional& functional,
                       const std::vector<ReplicateSummary>& summaries,
                       const BootstrapConfig& cfg, int n);
BootstrapDraws DrawSup(const Functional& functional, const ScoreField& field,
                       const ComparisonDataset& ds, const BootstrapConfig& cfg);

// Smallest sample t with empirical CDF(t) >= q: the ceil(q B)-th order
// statistic.
double EmpiricalQuantile(std::span<const double> samples, double q);
double EmpiricalQuantile(const BootstrapDraws& draws, double q);

}  // namespace rankdiag

#endif  // RANKDIAG_BOOTSTRAP_H_
