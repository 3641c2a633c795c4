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

#include "rankdiag/io.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rankdiag/error.h"

namespace rankdiag {
namespace {

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParseError,
                std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

template <typename F>
auto Decode(const char* what, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("malformed ") + what + ": " + e.what());
  }
}

Json Number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double ToDouble(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

Json Pairs(const OrderPairs& pairs) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs) out.push_back({a + 1, b + 1});
  return out;
}

OrderPairs PairsFrom(const Json& j) {
  OrderPairs out;
  for (const Json& p : j) {
    if (!p.is_array() || p.size() != 2) {
      throw Error(ErrorCode::kParseError, "order pair must be [k, i]");
    }
    out.emplace_back(p[0].get<int>() - 1, p[1].get<int>() - 1);
  }
  return out;
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < length; ++k) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

Json ParseJson(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

Json DatasetToJson(const ComparisonDataset& ds) {
  Json edges = Json::array();
  for (const Edge& e : ds.edges) {
    Json comparisons = Json::array();
    for (const Comparison& c : e.comparisons) {
      comparisons.push_back({{"x", c.x}, {"y", c.y}});
    }
    edges.push_back(
        {{"i", e.i + 1}, {"j", e.j + 1}, {"comparisons", comparisons}});
  }
  Json meta = Json::object();
  for (const auto& [key, value] : ds.meta) meta[key] = value;
  return {{"n", ds.n}, {"d", ds.d}, {"edges", edges}, {"meta", meta}};
}

ComparisonDataset DatasetFromJson(const Json& j) {
  return Decode("dataset", [&] {
    ComparisonDataset ds;
    ds.n = Field(j, "n").get<int>();
    ds.d = Field(j, "d").get<int>();
    for (const Json& e : Field(j, "edges")) {
      Edge edge;
      edge.i = Field(e, "i").get<int>() - 1;
      edge.j = Field(e, "j").get<int>() - 1;
      for (const Json& c : Field(e, "comparisons")) {
        Comparison comparison;
        comparison.x = Field(c, "x").get<std::vector<double>>();
        comparison.y = Field(c, "y").get<int>();
        edge.comparisons.push_back(std::move(comparison));
      }
      ds.edges.push_back(std::move(edge));
    }
    if (j.contains("meta")) {
      for (const auto& [key, value] : j.at("meta").items()) {
        ds.meta[key] = value.is_string() ? value.get<std::string>()
                                         : value.dump();
      }
    }
    return ds;
  });
}

Json GridSpecToJson(const GridSpec& spec) {
  if (spec.lattice_resolution) {
    return {{"lattice", {{"resolution", *spec.lattice_resolution}}}};
  }
  return {{"points", spec.points}};
}

GridSpec GridSpecFromJson(const Json& j) {
  return Decode("grid spec", [&] {
    if (j.contains("lattice")) {
      return GridSpec::Lattice(Field(j.at("lattice"), "resolution").get<int>());
    }
    return GridSpec::Explicit(
        Field(j, "points").get<std::vector<std::vector<double>>>());
  });
}

GridSpec ParseGridArgument(const std::string& arg) {
  const std::string prefix = "lattice:";
  if (arg.rfind(prefix, 0) == 0) {
    const std::string rest = arg.substr(prefix.size());
    std::size_t used = 0;
    int r = 0;
    try {
      r = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) {
      throw Error(ErrorCode::kParseError,
                  "grid \"" + arg + "\": expected lattice:<resolution>");
    }
    return GridSpec::Lattice(r);
  }
  if (!arg.empty() && arg.front() == '{') {
    return GridSpecFromJson(ParseJson(arg));
  }
  return GridSpecFromJson(ParseJson(ReadTextFile(arg)));
}

Json ScoreFieldToJson(const ScoreField& field) {
  Json theta = Json::array();
  for (const auto& row : field.theta) theta.push_back(row);
  Json diag = Json::array();
  for (const FitDiagnostics& d : field.diag) {
    diag.push_back({{"iters", d.iters},
                    {"gnorm", Number(d.gnorm)},
                    {"ok", d.converged},
                    {"degenerate", d.degenerate}});
  }
  return {{"n", field.n()},
          {"d", field.grid.dim()},
          {"grid",
           {{"spec", GridSpecToJson(field.grid.spec())},
            {"points", field.grid.points()}}},
          {"kernel",
           {{"family", KernelFamilyName(field.kernel.family)},
            {"h", field.kernel.h}}},
          {"lambda", field.lambda},
          {"xi", field.xi},
          {"theta", theta},
          {"diag", diag},
          {"warnings", field.warnings}};
}

ScoreField ScoreFieldFromJson(const Json& j) {
  return Decode("score field", [&] {
    ScoreField field;
    const int d = Field(j, "d").get<int>();
    const Json& grid = Field(j, "grid");
    field.grid = EvalGrid(
        d, Field(grid, "points").get<std::vector<std::vector<double>>>(),
        GridSpecFromJson(Field(grid, "spec")));
    const Json& kernel = Field(j, "kernel");
    field.kernel.family =
        ParseKernelFamily(Field(kernel, "family").get<std::string>());
    field.kernel.h = Field(kernel, "h").get<double>();
    field.lambda = Field(j, "lambda").get<double>();
    field.xi = Field(j, "xi").get<std::int64_t>();
    for (const Json& row : Field(j, "theta")) {
      field.theta.push_back(row.get<std::vector<double>>());
    }
    for (const Json& d_json : Field(j, "diag")) {
      FitDiagnostics diag;
      diag.iters = Field(d_json, "iters").get<int>();
      diag.gnorm = ToDouble(Field(d_json, "gnorm"));
      diag.converged = Field(d_json, "ok").get<bool>();
      diag.degenerate = d_json.value("degenerate", false);
      field.diag.push_back(std::move(diag));
    }
    if (j.contains("warnings")) {
      field.warnings = j.at("warnings").get<std::vector<std::string>>();
    }
    if (field.theta.size() != field.grid.size() ||
        field.diag.size() != field.grid.size()) {
      throw Error(ErrorCode::kParseError,
                  "score field theta/diag length differs from the grid");
    }
    return field;
  });
}

std::string ConfidenceBandToCsv(const ConfidenceBand& band) {
  std::ostringstream out;
  out << "model,point";
  for (int k = 0; k < band.grid.dim(); ++k) out << ",x" << (k + 1);
  out << ",lower,center,upper\n";
  const int n = band.center.empty() ? 0 : static_cast<int>(band.center[0].size());
  for (int m = 0; m < n; ++m) {
    for (std::size_t g = 0; g < band.grid.size(); ++g) {
      out << (m + 1) << ',' << (g + 1);
      for (double v : band.grid.point(g)) out << ',' << FormatDouble(v);
      out << ',' << FormatDouble(band.lower[g][m]) << ','
          << FormatDouble(band.center[g][m]) << ','
          << FormatDouble(band.upper[g][m]) << '\n';
    }
  }
  return out.str();
}

Json ConfidenceBandToJson(const ConfidenceBand& band) {
  return {{"alpha", band.alpha},
          {"c_hat", Number(band.c_hat)},
          {"half_width", Number(band.half_width)},
          {"grid", band.grid.points()},
          {"lower", band.lower},
          {"center", band.center},
          {"upper", band.upper}};
}

Json TestResultToJson(const TestResult& result) {
  Json j = {{"kind", result.kind == TestKind::kPair ? "pair" : "topk"},
            {"i", result.i + 1}};
  if (result.kind == TestKind::kPair) {
    j["j"] = result.j + 1;
  } else {
    j["k"] = result.k;
  }
  j["statistic"] = Number(result.statistic);
  j["critical"] = Number(result.critical);
  j["reject"] = result.reject;
  j["alpha"] = result.alpha;
  j["argmin"] = result.argmin + 1;
  j["argmin_point"] = result.argmin_point;
  return j;
}

Json BootstrapDrawsToJson(const BootstrapDraws& draws) {
  Json samples = Json::array();
  for (double v : draws.samples) samples.push_back(Number(v));
  return {{"functional", draws.functional.Describe()},
          {"replicates", draws.config.replicates},
          {"seed", draws.config.seed},
          {"samples", samples}};
}

Json DiagramToJson(const ConfidenceDiagram& diagram) {
  Json ranks = Json::array();
  for (const RankRange& r : PossibleRanks(diagram)) {
    ranks.push_back({r.min_rank, r.max_rank});
  }
  Json iterations = Json::array();
  for (const StepDownIteration& it : diagram.iterations) {
    iterations.push_back(
        {{"c", Number(it.critical)}, {"new", Pairs(it.newly_rejected)}});
  }
  return {{"n", diagram.n},
          {"alpha", diagram.alpha},
          {"levels", diagram.levels},
          {"hasse_edges", Pairs(diagram.hasse_edges)},
          {"rejected", Pairs(diagram.rejected)},
          {"possible_ranks", ranks},
          {"iterations", iterations}};
}

ConfidenceDiagram DiagramFromJson(const Json& j) {
  return Decode("diagram", [&] {
    ConfidenceDiagram diagram =
        DiagramFromRelation(PairsFrom(Field(j, "rejected")),
                            Field(j, "n").get<int>(),
                            Field(j, "alpha").get<double>());
    if (j.contains("iterations")) {
      for (const Json& it : j.at("iterations")) {
        StepDownIteration step;
        step.critical = ToDouble(Field(it, "c"));
        step.newly_rejected = PairsFrom(Field(it, "new"));
        diagram.iterations.push_back(std::move(step));
      }
    }
    return diagram;
  });
}

std::string DiagramToDot(const ConfidenceDiagram& diagram) {
  std::ostringstream out;
  out << "digraph confidence_diagram {\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=box];\n";
  for (int m = 0; m < diagram.n; ++m) {
    out << "  m" << (m + 1) << " [label=\"Model " << (m + 1) << "\"];\n";
  }
  int top = 0;
  for (int level : diagram.levels) top = std::max(top, level);
  for (int level = top; level >= 1; --level) {
    out << "  { rank=same;";
    for (int m = 0; m < diagram.n; ++m) {
      if (diagram.levels[m] == level) out << " m" << (m + 1) << ';';
    }
    out << " }  // level " << level << '\n';
  }
  for (const auto& [k, i] : diagram.hasse_edges) {
    out << "  m" << (k + 1) << " -> m" << (i + 1) << ";\n";
  }
  out << "}\n";
  return out.str();
}

Json ReportToJson(const ExperimentReport& report) {
  Json rows = Json::array();
  for (const ExperimentRow& row : report.rows) {
    Json metrics = Json::object();
    for (const auto& [name, value] : row.metrics) metrics[name] = Number(value);
    rows.push_back({{"replication", row.replication},
                    {"seed", row.seed},
                    {"metrics", metrics}});
  }
  Json aggregates = Json::object();
  for (const auto& [name, stat] : report.aggregates) {
    aggregates[name] = {{"mean", Number(stat.mean)},
                        {"se", Number(stat.se)},
                        {"count", stat.count}};
  }
  return {{"scenario", report.scenario},
          {"replications", report.replications},
          {"aggregates", aggregates},
          {"rows", rows},
          {"wall_seconds", report.wall_seconds}};
}

std::string ReportToCsv(const ExperimentReport& report) {
  std::vector<std::string> names;
  for (const auto& [name, stat] : report.aggregates) names.push_back(name);
  std::ostringstream out;
  out << "scenario,replication,seed";
  for (const std::string& name : names) out << ',' << name;
  out << '\n';
  for (const ExperimentRow& row : report.rows) {
    out << report.scenario << ',' << row.replication << ',' << row.seed;
    for (const std::string& name : names) {
      out << ',';
      auto it = row.metrics.find(name);
      if (it != row.metrics.end()) out << FormatDouble(it->second);
    }
    out << '\n';
  }
  return out.str();
}

std::string HeatmapToCsv(const RankHeatmap& heatmap) {
  std::ostringstream out;
  const int n = static_cast<int>(heatmap.freq.size());
  out << "model,true_rank";
  for (int r = 0; r < n; ++r) out << ",rank_" << (r + 1);
  out << '\n';
  for (int m = 0; m < n; ++m) {
    out << (m + 1) << ',' << heatmap.true_rank[m];
    for (double f : heatmap.freq[m]) out << ',' << FormatDouble(f);
    out << '\n';
  }
  return out.str();
}

}  // namespace rankdiag
