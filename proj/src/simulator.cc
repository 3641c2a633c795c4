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

#include "rankdiag/simulator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rankdiag/error.h"
#include "rankdiag/parallel.h"
#include "rankdiag/random.h"

namespace rankdiag {

ScoreFunctionSpec ScoreFunctionSpec::LinearSum(double coef) {
  ScoreFunctionSpec spec;
  spec.kind = ScoreKind::kLinearSum;
  spec.coef = coef;
  return spec;
}

ScoreFunctionSpec ScoreFunctionSpec::ExpSum() {
  ScoreFunctionSpec spec;
  spec.kind = ScoreKind::kExpSum;
  return spec;
}

ScoreFunctionSpec ScoreFunctionSpec::Constant(std::vector<double> c) {
  ScoreFunctionSpec spec;
  spec.kind = ScoreKind::kConstant;
  spec.constants = std::move(c);
  return spec;
}

ScoreFunctionSpec ScoreFunctionSpec::CustomTable(
    std::vector<std::vector<double>> points,
    std::vector<std::vector<double>> scores) {
  ScoreFunctionSpec spec;
  spec.kind = ScoreKind::kCustomTable;
  spec.table_points = std::move(points);
  spec.table_scores = std::move(scores);
  return spec;
}

std::string ScoreKindName(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kLinearSum:
      return "linearsum";
    case ScoreKind::kExpSum:
      return "expsum";
    case ScoreKind::kConstant:
      return "constant";
    case ScoreKind::kCustomTable:
      return "table";
  }
  return "unknown";
}

ScoreKind ParseScoreKind(const std::string& name) {
  if (name == "linearsum") return ScoreKind::kLinearSum;
  if (name == "expsum") return ScoreKind::kExpSum;
  if (name == "constant") return ScoreKind::kConstant;
  if (name == "table") return ScoreKind::kCustomTable;
  throw Error(ErrorCode::kInvalidConfig, "unknown score function '" + name +
                                             "' (expected linearsum, expsum, "
                                             "constant or table)");
}

void ValidateSimulationConfig(const SimulationConfig& cfg) {
  if (cfg.n < 2) {
    throw Error(ErrorCode::kInvalidConfig, "simulation needs n >= 2");
  }
  if (cfg.d < 1) {
    throw Error(ErrorCode::kInvalidConfig, "simulation needs d >= 1");
  }
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "edge probability must lie in [0,1]");
  }
  if (cfg.L < 1) {
    throw Error(ErrorCode::kInvalidConfig, "L must be >= 1");
  }
  const ScoreFunctionSpec& s = cfg.score;
  if (s.kind == ScoreKind::kConstant &&
      static_cast<int>(s.constants.size()) != cfg.n) {
    throw Error(ErrorCode::kInvalidConfig,
                "constant score needs exactly n values");
  }
  if (s.kind == ScoreKind::kCustomTable) {
    if (s.table_points.empty() ||
        s.table_points.size() != s.table_scores.size()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "score table needs matching, nonempty points and scores");
    }
    for (std::size_t t = 0; t < s.table_points.size(); ++t) {
      if (static_cast<int>(s.table_points[t].size()) != cfg.d ||
          static_cast<int>(s.table_scores[t].size()) != cfg.n) {
        throw Error(ErrorCode::kInvalidConfig,
                    "score table row " + std::to_string(t + 1) +
                        " has the wrong shape");
      }
    }
  }
}

Graph SampleErGraph(int n, double p, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::kInvalidConfig, "graph needs n >= 2");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "edge probability must lie in [0,1]");
  }
  Graph graph;
  graph.n = n;
  std::mt19937_64 rng = MakeStream(seed, StreamTag::kGraph, {});
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (unif(rng) < p) graph.edges.emplace_back(i, j);
    }
  }
  return graph;
}

std::vector<double> EvalScores(const ScoreFunctionSpec& spec, int n,
                               std::span<const double> x) {
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  std::vector<double> s(n);
  switch (spec.kind) {
    case ScoreKind::kLinearSum:
      for (int k = 0; k < n; ++k) s[k] = spec.coef * (k + 1) * sum;
      break;
    case ScoreKind::kExpSum: {
      const double e = std::exp(sum);
      for (int k = 0; k < n; ++k) s[k] = (k + 1) * e + (k + 1);
      break;
    }
    case ScoreKind::kConstant:
      for (int k = 0; k < n; ++k) s[k] = spec.constants.at(k);
      break;
    case ScoreKind::kCustomTable: {
      std::size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < spec.table_points.size(); ++t) {
        double dist = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
          const double diff = spec.table_points[t][k] - x[k];
          dist += diff * diff;
        }
        if (dist < best_dist) {
          best_dist = dist;
          best = t;
        }
      }
      for (int k = 0; k < n; ++k) s[k] = spec.table_scores[best].at(k);
      break;
    }
  }
  return s;
}

std::vector<double> CenterScores(std::span<const double> s) {
  std::vector<double> out(s.begin(), s.end());
  if (out.empty()) return out;
  const double mean =
      std::accumulate(out.begin(), out.end(), 0.0) / out.size();
  for (double& v : out) v -= mean;
  return out;
}

std::vector<double> TrueTheta(const ScoreFunctionSpec& spec, int n,
                              std::span<const double> x) {
  std::vector<double> s = EvalScores(spec, n, x);
  if (spec.kind == ScoreKind::kExpSum) {
    for (double& v : s) v = std::log(v);
  }
  return CenterScores(s);
}

ComparisonDataset SampleDataset(const SimulationConfig& cfg) {
  ValidateSimulationConfig(cfg);
  const Graph graph = SampleErGraph(cfg.n, cfg.p, cfg.seed);

  ComparisonDataset ds;
  ds.n = cfg.n;
  ds.d = cfg.d;
  ds.edges.resize(graph.edges.size());
  ParallelFor(graph.edges.size(), cfg.workers, [&](std::size_t e) {
    const auto [i, j] = graph.edges[e];
    // Keyed by the pair itself, so an edge's comparisons do not depend on
    // which other edges were drawn.
    std::mt19937_64 rng =
        MakeStream(cfg.seed, StreamTag::kEdge,
                   {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Edge& edge = ds.edges[e];
    edge.i = i;
    edge.j = j;
    edge.comparisons.resize(cfg.L);
    for (Comparison& c : edge.comparisons) {
      c.x.resize(cfg.d);
      for (double& v : c.x) v = unif(rng);
      const std::vector<double> theta = TrueTheta(cfg.score, cfg.n, c.x);
      c.y = unif(rng) < Logistic(theta[j] - theta[i]) ? 1 : 0;
    }
  });
  ds.meta["generator"] = "rankdiag simulate";
  ds.meta["score"] = ScoreKindName(cfg.score.kind);
  ds.meta["seed"] = std::to_string(cfg.seed);
  ds.meta["p"] = std::to_string(cfg.p);
  ds.meta["L"] = std::to_string(cfg.L);
  return ds;
}

std::vector<int> TrueOrder(const ScoreFunctionSpec& spec, int n,
                           const EvalGrid& grid) {
  std::vector<double> mean(n, 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::vector<double> theta = TrueTheta(spec, n, grid.point(g));
    for (int m = 0; m < n; ++m) mean[m] += theta[m] / grid.size();
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mean[a] > mean[b]; });
  return order;
}

}  // namespace rankdiag
