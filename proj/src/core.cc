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

#include "rankdiag/core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rankdiag/error.h"

namespace rankdiag {

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateEdge:
      return "DuplicateEdge";
    case ErrorCode::kSelfLoop:
      return "SelfLoop";
    case ErrorCode::kIndexOutOfRange:
      return "IndexOutOfRange";
    case ErrorCode::kPromptOutOfDomain:
      return "PromptOutOfDomain";
    case ErrorCode::kEmptyEdge:
      return "EmptyEdge";
    case ErrorCode::kInvalidOutcome:
      return "InvalidOutcome";
    case ErrorCode::kEmptyGrid:
      return "EmptyGrid";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kDegenerateInput:
      return "DegenerateInput";
    case ErrorCode::kAllWindowsEmpty:
      return "AllWindowsEmpty";
    case ErrorCode::kBadK:
      return "BadK";
    case ErrorCode::kCycleDetected:
      return "CycleDetected";
    case ErrorCode::kNotAPermutation:
      return "NotAPermutation";
    case ErrorCode::kNotConverged:
      return "NotConverged";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

namespace {

std::string EdgeLabel(std::size_t e, const Edge& edge) {
  std::ostringstream out;
  out << "edge #" << (e + 1) << " (" << (edge.i + 1) << ", " << (edge.j + 1)
      << ")";
  return out.str();
}

void CheckPrompt(std::span<const double> x, int d, const std::string& where) {
  if (static_cast<int>(x.size()) != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                where + ": prompt has " + std::to_string(x.size()) +
                    " components, expected " + std::to_string(d));
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] >= 0.0 && x[k] <= 1.0)) {
      std::ostringstream out;
      out << where << ": component " << (k + 1) << " = " << x[k]
          << " outside [0,1]";
      throw Error(ErrorCode::kPromptOutOfDomain, out.str());
    }
  }
}

}  // namespace

void ValidateDataset(const ComparisonDataset& ds) {
  if (ds.n < 2) {
    throw Error(ErrorCode::kInvalidConfig,
                "dataset needs n >= 2, got " + std::to_string(ds.n));
  }
  if (ds.d < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "dataset needs d >= 1, got " + std::to_string(ds.d));
  }
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < ds.edges.size(); ++e) {
    const Edge& edge = ds.edges[e];
    const std::string label = EdgeLabel(e, edge);
    if (edge.i == edge.j) {
      throw Error(ErrorCode::kSelfLoop, label + ": self-loop");
    }
    if (edge.i < 0 || edge.j >= ds.n || edge.i > edge.j) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  label + ": requires 1 <= i < j <= n = " +
                      std::to_string(ds.n));
    }
    if (!seen.emplace(edge.i, edge.j).second) {
      throw Error(ErrorCode::kDuplicateEdge, label + ": duplicate edge");
    }
    if (edge.comparisons.empty()) {
      throw Error(ErrorCode::kEmptyEdge, label + ": no comparisons");
    }
    for (std::size_t l = 0; l < edge.comparisons.size(); ++l) {
      const Comparison& c = edge.comparisons[l];
      const std::string where =
          label + " comparison #" + std::to_string(l + 1);
      CheckPrompt(c.x, ds.d, where);
      if (c.y != 0 && c.y != 1) {
        throw Error(ErrorCode::kInvalidOutcome,
                    where + ": outcome must be 0 or 1, got " +
                        std::to_string(c.y));
      }
    }
  }
}

void ValidateEstimatorConfig(const EstimatorConfig& cfg) {
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) {
    throw Error(ErrorCode::kInvalidConfig, "bandwidth h must be > 0");
  }
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
    throw Error(ErrorCode::kInvalidConfig, "lambda must be >= 0");
  }
  if (!(cfg.eta >= 0.0) || !std::isfinite(cfg.eta)) {
    throw Error(ErrorCode::kInvalidConfig,
                "eta must be > 0 (or 0 for automatic)");
  }
  if (cfg.max_iters < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_iters must be >= 1");
  }
  if (!(cfg.grad_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "grad_tol must be > 0");
  }
}

void ValidateBootstrapConfig(const BootstrapConfig& cfg) {
  if (cfg.replicates < 2) {
    throw Error(ErrorCode::kInvalidConfig, "B must be >= 2");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha must lie in (0, 1)");
  }
  if (cfg.workers < 1) {
    throw Error(ErrorCode::kInvalidConfig, "workers must be >= 1");
  }
}

std::int64_t EffectiveSampleSize(const ComparisonDataset& ds) {
  std::int64_t total = 0;
  for (const Edge& edge : ds.edges) {
    total += static_cast<std::int64_t>(edge.comparisons.size());
  }
  return total;
}

PlugInNormalizers ComputePlugIns(const ComparisonDataset& ds) {
  const double edges = static_cast<double>(ds.edges.size());
  const double xi = static_cast<double>(EffectiveSampleSize(ds));
  if (ds.n < 2 || edges == 0.0 || xi == 0.0) {
    throw Error(ErrorCode::kDegenerateInput,
                "plug-in normalizers need at least one compared edge");
  }
  PlugInNormalizers out;
  out.p_hat = 2.0 * edges / (static_cast<double>(ds.n) * (ds.n - 1));
  out.l_bar = xi / edges;
  return out;
}

EvalGrid::EvalGrid(int d, std::vector<std::vector<double>> points,
                   GridSpec spec)
    : d_(d), points_(std::move(points)), spec_(std::move(spec)) {}

std::size_t EvalGrid::NearestIndex(std::span<const double> x) const {
  if (spec_.lattice_resolution.has_value()) {
    const int r = *spec_.lattice_resolution;
    if (r == 1) return 0;
    std::size_t index = 0;
    for (int k = 0; k < d_; ++k) {
      // Round half down so ties land on the lower lattice index.
      const double scaled = std::clamp(x[k], 0.0, 1.0) * (r - 1);
      int step = static_cast<int>(std::ceil(scaled - 0.5));
      step = std::clamp(step, 0, r - 1);
      index = index * static_cast<std::size_t>(r) +
              static_cast<std::size_t>(step);
    }
    return index;
  }
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < points_.size(); ++p) {
    double dist = 0.0;
    for (int k = 0; k < d_; ++k) {
      const double diff = points_[p][k] - x[k];
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

EvalGrid MakeGrid(const GridSpec& spec, int d) {
  if (d < 1) {
    throw Error(ErrorCode::kInvalidConfig, "grid dimension must be >= 1");
  }
  if (spec.lattice_resolution.has_value()) {
    const int r = *spec.lattice_resolution;
    if (r < 1) {
      throw Error(ErrorCode::kEmptyGrid, "lattice resolution must be >= 1");
    }
    double total = std::pow(static_cast<double>(r), d);
    if (total > static_cast<double>(kMaxGridPoints)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "lattice has " + std::to_string(static_cast<long long>(total)) +
                      " points, cap is " + std::to_string(kMaxGridPoints));
    }
    std::vector<double> axis(r);
    for (int s = 0; s < r; ++s) {
      axis[s] = r == 1 ? 0.5 : static_cast<double>(s) / (r - 1);
    }
    const std::size_t count = static_cast<std::size_t>(total);
    std::vector<std::vector<double>> points(count, std::vector<double>(d));
    // First coordinate varies slowest.
    for (std::size_t p = 0; p < count; ++p) {
      std::size_t rest = p;
      for (int k = d - 1; k >= 0; --k) {
        points[p][k] = axis[rest % r];
        rest /= r;
      }
    }
    return EvalGrid(d, std::move(points), spec);
  }
  if (spec.points.empty()) {
    throw Error(ErrorCode::kEmptyGrid, "explicit grid has no points");
  }
  if (spec.points.size() > kMaxGridPoints) {
    throw Error(ErrorCode::kInvalidConfig,
                "explicit grid exceeds " + std::to_string(kMaxGridPoints) +
                    " points");
  }
  for (std::size_t p = 0; p < spec.points.size(); ++p) {
    CheckPrompt(spec.points[p], d, "grid point #" + std::to_string(p + 1));
  }
  return EvalGrid(d, spec.points, spec);
}

int DefaultLatticeResolution(int d) {
  if (d <= 3) return 5;
  int r = 1;
  while (std::pow(static_cast<double>(r + 1), d) <=
         static_cast<double>(kMaxGridPoints)) {
    ++r;
  }
  return r;
}

FlatComparisons Flatten(const ComparisonDataset& ds) {
  FlatComparisons flat;
  flat.n = ds.n;
  flat.d = ds.d;
  const std::size_t total = static_cast<std::size_t>(EffectiveSampleSize(ds));
  flat.edge_of.reserve(total);
  flat.y.reserve(total);
  flat.x.reserve(total * static_cast<std::size_t>(ds.d));
  for (std::size_t e = 0; e < ds.edges.size(); ++e) {
    const Edge& edge = ds.edges[e];
    flat.edges.emplace_back(edge.i, edge.j);
    for (const Comparison& c : edge.comparisons) {
      flat.edge_of.push_back(static_cast<int>(e));
      flat.y.push_back(static_cast<std::uint8_t>(c.y));
      flat.x.insert(flat.x.end(), c.x.begin(), c.x.end());
    }
  }
  return flat;
}

}  // namespace rankdiag
