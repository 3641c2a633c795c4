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

// Domain types shared by every stage of the ranking pipeline.
//
// Model indices are 0-based in memory and 1-based in every file format; the
// conversion happens in io.cc and nowhere else.

#ifndef RANKDIAG_CORE_H_
#define RANKDIAG_CORE_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rankdiag {

// One judged comparison on an edge (i, j): the prompt embedding x in [0,1]^d
// and the outcome y, where y == 1 means the second model j was preferred.
struct Comparison {
  std::vector<double> x;
  int y = 0;
};

struct Edge {
  int i = 0;  // i < j
  int j = 0;
  std::vector<Comparison> comparisons;
};

struct ComparisonDataset {
  int n = 0;
  int d = 0;
  std::vector<Edge> edges;
  std::map<std::string, std::string> meta;
};

// Simple undirected graph; edges are stored as (i, j) with i < j.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

// Either a per-dimension lattice resolution or an explicit point list.
struct GridSpec {
  std::optional<int> lattice_resolution;
  std::vector<std::vector<double>> points;

  static GridSpec Lattice(int resolution) {
    GridSpec spec;
    spec.lattice_resolution = resolution;
    return spec;
  }
  static GridSpec Explicit(std::vector<std::vector<double>> points) {
    GridSpec spec;
    spec.points = std::move(points);
    return spec;
  }
};

inline constexpr std::size_t kMaxGridPoints = 4096;

class EvalGrid {
 public:
  EvalGrid() = default;
  EvalGrid(int d, std::vector<std::vector<double>> points, GridSpec spec);

  int dim() const { return d_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<double>& point(std::size_t k) const { return points_[k]; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const GridSpec& spec() const { return spec_; }

  // Index of the grid point closest to x in Euclidean distance; ties go to
  // the lowest index.
  std::size_t NearestIndex(std::span<const double> x) const;

 private:
  int d_ = 0;
  std::vector<std::vector<double>> points_;
  GridSpec spec_;
};

enum class KernelFamily { kEpanechnikov, kUniformBox };

struct EstimatorConfig {
  double h = 0.3;
  double lambda = 0.0;
  // Gradient step; 0 selects the per-point curvature bound.
  double eta = 0.0;
  int max_iters = 10000;
  double grad_tol = 1e-8;
  KernelFamily kernel = KernelFamily::kEpanechnikov;
  bool record_loss_trace = false;
};

struct BootstrapConfig {
  int replicates = 500;
  std::uint64_t seed = 0;
  double alpha = 0.1;
  int workers = 1;
  // Test hook: every multiplier is 0.
  bool zero_multipliers = false;
};

void ValidateDataset(const ComparisonDataset& ds);
void ValidateEstimatorConfig(const EstimatorConfig& cfg);
void ValidateBootstrapConfig(const BootstrapConfig& cfg);

// Total comparison count, each unordered edge counted once.
std::int64_t EffectiveSampleSize(const ComparisonDataset& ds);

// Plug-in edge density 2|E|/(n(n-1)) and mean comparisons per edge.
struct PlugInNormalizers {
  double p_hat = 0.0;
  double l_bar = 0.0;
};
PlugInNormalizers ComputePlugIns(const ComparisonDataset& ds);

EvalGrid MakeGrid(const GridSpec& spec, int d);

// Lattice resolution used when the caller does not choose one.
int DefaultLatticeResolution(int d);

// All comparisons laid out contiguously in dataset iteration order (edges in
// stored order, comparisons in stored order). Index k in this layout is the
// "comparison rank" used to key bootstrap multipliers.
struct FlatComparisons {
  int n = 0;
  int d = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> edge_of;
  std::vector<double> x;  // row-major, size() * d
  std::vector<std::uint8_t> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> prompt(std::size_t k) const {
    return {x.data() + k * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
};
FlatComparisons Flatten(const ComparisonDataset& ds);

inline double Logistic(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t))
                : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace rankdiag

#endif  // RANKDIAG_CORE_H_
