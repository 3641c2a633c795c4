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

// Synthetic comparison data: Erdos-Renyi comparison graphs, parametric score
// fields, and Bernoulli outcomes under the Bradley-Terry-Luce model.

#ifndef RANKDIAG_SIMULATOR_H_
#define RANKDIAG_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankdiag/core.h"

namespace rankdiag {

enum class ScoreKind {
  kLinearSum,    // s_i(x) = coef * i * sum_k x_k           (log-scores)
  kExpSum,       // s_i(x) = i * exp(sum_k x_k) + i         (positive scores)
  kConstant,     // s_i(x) = c_i                            (log-scores)
  kCustomTable,  // s(x) = scores of the nearest table point (log-scores)
};

struct ScoreFunctionSpec {
  ScoreKind kind = ScoreKind::kLinearSum;
  double coef = 0.01;
  std::vector<double> constants;
  std::vector<std::vector<double>> table_points;
  std::vector<std::vector<double>> table_scores;

  static ScoreFunctionSpec LinearSum(double coef = 0.01);
  static ScoreFunctionSpec ExpSum();
  static ScoreFunctionSpec Constant(std::vector<double> c);
  static ScoreFunctionSpec CustomTable(std::vector<std::vector<double>> points,
                                       std::vector<std::vector<double>> scores);
};

std::string ScoreKindName(ScoreKind kind);
ScoreKind ParseScoreKind(const std::string& name);

enum class PromptDistribution { kUniform };

struct SimulationConfig {
  int n = 10;
  int d = 3;
  double p = 0.5;
  int L = 100;
  ScoreFunctionSpec score;
  PromptDistribution prompts = PromptDistribution::kUniform;
  std::uint64_t seed = 0;
  int workers = 1;
};

void ValidateSimulationConfig(const SimulationConfig& cfg);

// Each of the n(n-1)/2 pairs is kept independently with probability p.
Graph SampleErGraph(int n, double p, std::uint64_t seed);

// Raw (uncentered) score vector of length n. Model i is 1-based in the
// formulas, so entry k of the result belongs to model k + 1.
std::vector<double> EvalScores(const ScoreFunctionSpec& spec, int n,
                               std::span<const double> x);

// s - mean(s).
std::vector<double> CenterScores(std::span<const double> s);

// Centered log-score vector theta*(x) that drives the outcomes. ExpSum values
// are preference weights, so their logarithm is taken before centering.
std::vector<double> TrueTheta(const ScoreFunctionSpec& spec, int n,
                              std::span<const double> x);

ComparisonDataset SampleDataset(const SimulationConfig& cfg);

// 0-based model ids from best to worst by grid-averaged theta*; ties keep
// the lower id first.
std::vector<int> TrueOrder(const ScoreFunctionSpec& spec, int n,
                           const EvalGrid& grid);

}  // namespace rankdiag

#endif  // RANKDIAG_SIMULATOR_H_
