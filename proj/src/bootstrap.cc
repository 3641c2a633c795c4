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

#include "rankdiag/bootstrap.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rankdiag/error.h"
#include "rankdiag/parallel.h"
#include "rankdiag/random.h"

namespace rankdiag {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckFieldMatches(const ScoreField& field, const ComparisonDataset& ds) {
  if (field.n() != ds.n || field.grid.dim() != ds.d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "score field does not match the dataset's n or d");
  }
}

double SampleNormalizer(const ComparisonDataset& ds) {
  const PlugInNormalizers plug = ComputePlugIns(ds);
  return 1.0 / (ds.n * plug.p_hat * plug.l_bar);
}

}  // namespace

MultiplierDraw MultiplierDraw::Generate(std::size_t count, std::uint64_t seed,
                                        int replicate) {
  std::mt19937_64 rng = MakeStream(seed, StreamTag::kMultiplier,
                                   {static_cast<std::uint64_t>(replicate)});
  std::normal_distribution<double> normal(0.0, 1.0);
  MultiplierDraw draw;
  draw.xi.resize(count);
  for (double& v : draw.xi) v = normal(rng);
  return draw;
}

double Vbar(int model, std::span<const double> x, const ScoreField& field,
            const ComparisonDataset& ds, const KernelSpec& spec) {
  CheckFieldMatches(field, ds);
  std::vector<double> u(ds.d);
  double total = 0.0;
  for (const Edge& edge : ds.edges) {
    if (edge.i != model && edge.j != model) continue;
    for (const Comparison& c : edge.comparisons) {
      for (int k = 0; k < ds.d; ++k) u[k] = c.x[k] - x[k];
      const double w = KernelWeight(spec, u);
      if (w == 0.0) continue;
      const std::vector<double>& t = field.theta[field.grid.NearestIndex(c.x)];
      const double psi = Logistic(t[edge.j] - t[edge.i]);
      total += w * psi * (1.0 - psi);
    }
  }
  return total * SampleNormalizer(ds);
}

double Gbar(int model, std::span<const double> x, const ScoreField& field,
            const ComparisonDataset& ds, const KernelSpec& spec,
            const MultiplierDraw& draw) {
  CheckFieldMatches(field, ds);
  if (static_cast<std::int64_t>(draw.xi.size()) != EffectiveSampleSize(ds)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "multiplier draw size does not match the dataset");
  }
  std::vector<double> u(ds.d);
  double total = 0.0;
  std::size_t k = 0;
  for (const Edge& edge : ds.edges) {
    const bool touches = edge.i == model || edge.j == model;
    const double sign = edge.j == model ? 1.0 : -1.0;
    for (const Comparison& c : edge.comparisons) {
      const double xi = draw.xi[k++];
      if (!touches) continue;
      for (int dim = 0; dim < ds.d; ++dim) u[dim] = c.x[dim] - x[dim];
      const double w = KernelWeight(spec, u);
      if (w == 0.0) continue;
      const std::vector<double>& t = field.theta[field.grid.NearestIndex(c.x)];
      const double residual = Logistic(t[edge.j] - t[edge.i]) - c.y;
      total += sign * xi * w * residual;
    }
  }
  return total * SampleNormalizer(ds);
}

Functional Functional::Band() { return Functional{}; }

Functional Functional::Pair(int i, int j) {
  Functional f;
  f.kind = FunctionalKind::kPair;
  f.i = i;
  f.j = j;
  return f;
}

Functional Functional::TopK(int i) {
  Functional f;
  f.kind = FunctionalKind::kTopK;
  f.i = i;
  return f;
}

Functional Functional::Diagram(std::vector<std::pair<int, int>> active) {
  Functional f;
  f.kind = FunctionalKind::kDiagram;
  f.active = std::move(active);
  return f;
}

std::string Functional::Describe() const {
  std::ostringstream out;
  switch (kind) {
    case FunctionalKind::kBand:
      out << "BAND";
      break;
    case FunctionalKind::kPair:
      out << "PAIR(" << (i + 1) << "," << (j + 1) << ")";
      break;
    case FunctionalKind::kTopK:
      out << "TOPK(" << (i + 1) << ")";
      break;
    case FunctionalKind::kDiagram:
      out << "DIAGRAM(" << active.size() << " pairs)";
      break;
  }
  return out.str();
}

MultiplierBootstrap::MultiplierBootstrap(const ScoreField& field,
                                         const ComparisonDataset& ds)
    : n_(ds.n), points_(field.grid.size()) {
  CheckFieldMatches(field, ds);
  const FlatComparisons flat = Flatten(ds);
  comparisons_ = flat.size();
  const double normalizer = SampleNormalizer(ds);
  root_scale_ = std::sqrt(std::pow(field.kernel.h, ds.d) *
                          static_cast<double>(comparisons_));

  // Residual and curvature of every comparison under theta-hat at the grid
  // point nearest to its prompt.
  std::vector<double> residual(comparisons_);
  std::vector<double> curvature(comparisons_);
  for (std::size_t k = 0; k < comparisons_; ++k) {
    const auto [i, j] = flat.edges[flat.edge_of[k]];
    const std::vector<double>& t =
        field.theta[field.grid.NearestIndex(flat.prompt(k))];
    const double psi = Logistic(t[j] - t[i]);
    residual[k] = psi - flat.y[k];
    curvature[k] = psi * (1.0 - psi);
  }

  terms_.resize(points_);
  vbar_.assign(points_ * n_, 0.0);
  std::vector<double> u(ds.d);
  for (std::size_t g = 0; g < points_; ++g) {
    const std::vector<double>& x = field.grid.point(g);
    for (std::size_t k = 0; k < comparisons_; ++k) {
      const std::span<const double> prompt = flat.prompt(k);
      for (int c = 0; c < ds.d; ++c) u[c] = prompt[c] - x[c];
      const double w = KernelWeight(field.kernel, u);
      if (w == 0.0) continue;
      const auto [i, j] = flat.edges[flat.edge_of[k]];
      terms_[g].push_back(Term{static_cast<std::uint32_t>(k),
                               static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(j),
                               w * residual[k] * normalizer});
      vbar_[g * n_ + i] += w * curvature[k] * normalizer;
      vbar_[g * n_ + j] += w * curvature[k] * normalizer;
    }
  }
}

WMatrix MultiplierBootstrap::W(const MultiplierDraw& draw) const {
  if (draw.xi.size() != comparisons_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "multiplier draw size does not match the dataset");
  }
  WMatrix w;
  w.n = n_;
  w.points = points_;
  w.values.assign(points_ * n_, 0.0);
  w.valid.assign(points_ * n_, 0);
  std::vector<double> gbar(n_);
  for (std::size_t g = 0; g < points_; ++g) {
    std::fill(gbar.begin(), gbar.end(), 0.0);
    for (const Term& term : terms_[g]) {
      const double v = draw.xi[term.comparison] * term.coef;
      gbar[term.j] += v;
      gbar[term.i] -= v;
    }
    for (int m = 0; m < n_; ++m) {
      const double vb = vbar_[g * n_ + m];
      if (vb > 0.0) {
        w.values[g * n_ + m] = -root_scale_ * gbar[m] / vb;
        w.valid[g * n_ + m] = 1;
      }
    }
  }
  return w;
}

ReplicateSummary MultiplierBootstrap::Summarize(const WMatrix& w) const {
  ReplicateSummary out;
  out.band = kNegInf;
  out.pair.assign(static_cast<std::size_t>(n_) * n_, kNegInf);
  for (std::size_t g = 0; g < points_; ++g) {
    for (int i = 0; i < n_; ++i) {
      if (!w.is_valid(i, g)) continue;
      const double wi = w.at(i, g);
      out.band = std::max(out.band, std::abs(wi));
      for (int j = 0; j < n_; ++j) {
        if (j == i || !w.is_valid(j, g)) continue;
        double& slot = out.pair[static_cast<std::size_t>(i) * n_ + j];
        slot = std::max(slot, wi - w.at(j, g));
      }
    }
  }
  return out;
}

std::vector<ReplicateSummary> MultiplierBootstrap::Run(
    const BootstrapConfig& cfg) const {
  ValidateBootstrapConfig(cfg);
  std::vector<ReplicateSummary> out(cfg.replicates);
  ParallelFor(out.size(), cfg.workers, [&](std::size_t b) {
    MultiplierDraw draw;
    if (cfg.zero_multipliers) {
      draw.xi.assign(comparisons_, 0.0);
    } else {
      draw = MultiplierDraw::Generate(comparisons_, cfg.seed,
                                      static_cast<int>(b));
    }
    out[b] = Summarize(W(draw));
  });
  return out;
}

WMatrix WProcess(const ScoreField& field, const ComparisonDataset& ds,
                 const MultiplierDraw& draw) {
  const WMatrix w = MultiplierBootstrap(field, ds).W(draw);
  if (std::none_of(w.valid.begin(), w.valid.end(),
                   [](std::uint8_t v) { return v != 0; })) {
    throw Error(ErrorCode::kAllWindowsEmpty,
                "no (model, grid point) cell has data in its kernel window");
  }
  return w;
}

BootstrapDraws DrawSup(const Functional& functional,
                       const std::vector<ReplicateSummary>& summaries,
                       const BootstrapConfig& cfg, int n) {
  auto check_index = [n](int m) {
    if (m < 0 || m >= n) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "model index " + std::to_string(m + 1) + " outside 1.." +
                      std::to_string(n));
    }
  };
  switch (functional.kind) {
    case FunctionalKind::kBand:
      break;
    case FunctionalKind::kPair:
      check_index(functional.i);
      check_index(functional.j);
      if (functional.i == functional.j) {
        throw Error(ErrorCode::kIndexOutOfRange, "PAIR needs i != j");
      }
      break;
    case FunctionalKind::kTopK:
      check_index(functional.i);
      break;
    case FunctionalKind::kDiagram:
      for (const auto& [i, j] : functional.active) {
        check_index(i);
        check_index(j);
      }
      break;
  }

  BootstrapDraws draws;
  draws.functional = functional;
  draws.config = cfg;
  draws.samples.reserve(summaries.size());
  for (const ReplicateSummary& s : summaries) {
    auto pair = [&](int i, int j) {
      return s.pair[static_cast<std::size_t>(i) * n + j];
    };
    double value = kNegInf;
    switch (functional.kind) {
      case FunctionalKind::kBand:
        value = s.band;
        break;
      case FunctionalKind::kPair:
        value = pair(functional.i, functional.j);
        break;
      case FunctionalKind::kTopK:
        for (int j = 0; j < n; ++j) {
          if (j != functional.i) value = std::max(value, pair(functional.i, j));
        }
        break;
      case FunctionalKind::kDiagram:
        for (const auto& [i, j] : functional.active) {
          if (i != j) value = std::max(value, pair(i, j));
        }
        break;
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kAllWindowsEmpty,
                  functional.Describe() +
                      ": no valid grid cell enters the supremum");
    }
    draws.samples.push_back(value);
  }
  return draws;
}

BootstrapDraws DrawSup(const Functional& functional, const ScoreField& field,
                       const ComparisonDataset& ds,
                       const BootstrapConfig& cfg) {
  const MultiplierBootstrap engine(field, ds);
  return DrawSup(functional, engine.Run(cfg), cfg, ds.n);
}

double EmpiricalQuantile(std::span<const double> samples, double q) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "quantile of an empty sample");
  }
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "quantile level must lie in (0,1)");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  // The guard absorbs products such as 0.9 * 200 = 180.00000000000003.
  long rank = static_cast<long>(std::ceil(q * count - 1e-9));
  rank = std::clamp(rank, 1L, static_cast<long>(sorted.size()));
  return sorted[rank - 1];
}

double EmpiricalQuantile(const BootstrapDraws& draws, double q) {
  return EmpiricalQuantile(draws.samples, q);
}

}  // namespace rankdiag
