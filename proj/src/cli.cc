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

#include "rankdiag/cli.h"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rankdiag/bootstrap.h"
#include "rankdiag/core.h"
#include "rankdiag/diagram.h"
#include "rankdiag/error.h"
#include "rankdiag/estimator.h"
#include "rankdiag/experiments.h"
#include "rankdiag/inference.h"
#include "rankdiag/io.h"
#include "rankdiag/random.h"
#include "rankdiag/simulator.h"

#ifndef RANKDIAG_VERSION
#define RANKDIAG_VERSION "0.0.0"
#endif

namespace rankdiag {
namespace {

namespace fs = std::filesystem;

struct FitOptions {
  std::string grid = "lattice:5";
  double h = 0.0;
  double lambda = -1.0;
  std::string kernel = "epanechnikov";
  int max_iters = 10000;
  double grad_tol = 1e-8;
};

struct BootOptions {
  double alpha = 0.1;
  int replicates = 500;
  std::uint64_t seed = 0;
};

struct Options {
  int workers = 1;
  // simulate
  int n = 10;
  int d = 3;
  double p = 0.5;
  int L = 100;
  std::string score = "linearsum";
  double coef = 0.01;
  std::string constants;
  std::string table;
  std::uint64_t seed = 0;
  // shared
  std::string dataset;
  std::string field;
  std::string out;
  FitOptions fit;
  BootOptions boot;
  int i = 0;
  int j = 0;
  int k = 1;
  // reproduce
  int figure = 0;
  int reps = 0;
  int figure_replicates = 0;
  // run
  std::string manifest;
};

// Everything needed to write a manifest for one invocation.
struct Invocation {
  std::string command;
  Json config = Json::object();
  Json inputs = Json::object();
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
};

std::uint64_t ResolveSeed(std::uint64_t flag) {
  const char* env = std::getenv("RANKDIAG_SEED");
  if (env == nullptr || *env == '\0') return flag;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used == std::string(env).size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidConfig,
              std::string("RANKDIAG_SEED is not an unsigned integer: ") + env);
}

std::string Stem(const std::string& out) {
  const std::string ext = ".json";
  if (out.size() > ext.size() &&
      out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size());
  }
  return out;
}

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string ConfigValue(const Json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

void Emit(Invocation& inv, const std::string& path,
          const std::string& contents) {
  WriteTextFile(path, contents);
  inv.outputs.push_back(path);
}

void WriteManifest(const Invocation& inv, const std::string& path,
                   const std::vector<std::string>& argv, int workers) {
  Json replay = Json::array({inv.command});
  for (const auto& [key, value] : inv.config.items()) {
    replay.push_back("--" + key);
    replay.push_back(ConfigValue(value));
  }
  Json outputs = Json::object();
  for (const std::string& out : inv.outputs) {
    outputs[out] = Sha256Hex(ReadTextFile(out));
  }
  const Json manifest = {{"command", inv.command},
                         {"argv", argv},
                         {"config", inv.config},
                         {"workers", workers},
                         {"seed", inv.seed},
                         {"replay", replay},
                         {"inputs", inv.inputs},
                         {"outputs", outputs},
                         {"version", ToolVersion()},
                         {"timestamp", Timestamp()}};
  WriteTextFile(path, DumpJson(manifest));
}

ComparisonDataset LoadDataset(const std::string& path, Invocation& inv) {
  const std::string text = ReadTextFile(path);
  inv.inputs[path] = Sha256Hex(text);
  ComparisonDataset ds = DatasetFromJson(ParseJson(text));
  ValidateDataset(ds);
  return ds;
}

EstimatorConfig ResolveEstimator(const FitOptions& fit,
                                 const ComparisonDataset& ds,
                                 Invocation& inv) {
  EstimatorConfig cfg = DefaultEstimatorConfig(ds);
  cfg.kernel = ParseKernelFamily(fit.kernel);
  cfg.max_iters = fit.max_iters;
  cfg.grad_tol = fit.grad_tol;
  if (fit.h > 0) {
    cfg.h = fit.h;
    const PlugInNormalizers plug = ComputePlugIns(ds);
    cfg.lambda = DefaultLambda(ds.n, plug.p_hat, plug.l_bar, cfg.h, ds.d);
  }
  if (fit.lambda >= 0) cfg.lambda = fit.lambda;
  ValidateEstimatorConfig(cfg);
  inv.config["grid"] = fit.grid;
  inv.config["h"] = cfg.h;
  inv.config["lambda"] = cfg.lambda;
  inv.config["kernel"] = KernelFamilyName(cfg.kernel);
  inv.config["max-iters"] = cfg.max_iters;
  inv.config["grad-tol"] = cfg.grad_tol;
  return cfg;
}

void ReportWarnings(const ScoreField& field, std::ostream& err) {
  for (const std::string& w : field.warnings) err << "warning: " << w << '\n';
}

ScoreField FitFromOptions(const Options& o, const ComparisonDataset& ds,
                          Invocation& inv, std::ostream& err) {
  const EstimatorConfig cfg = ResolveEstimator(o.fit, ds, inv);
  const EvalGrid grid = MakeGrid(ParseGridArgument(o.fit.grid), ds.d);
  ScoreField field = FitField(grid, ds, cfg, o.workers);
  ReportWarnings(field, err);
  return field;
}

// Loads --field when it exists, otherwise fits and caches the field there
// (or next to the outputs when --field is absent).
ScoreField ObtainField(const Options& o, const ComparisonDataset& ds,
                       const std::string& stem, Invocation& inv,
                       std::ostream& err) {
  if (!o.field.empty()) inv.config["field"] = o.field;
  if (!o.field.empty() && fs::exists(o.field)) {
    const std::string text = ReadTextFile(o.field);
    inv.inputs[o.field] = Sha256Hex(text);
    ScoreField field = ScoreFieldFromJson(ParseJson(text));
    if (field.n() != ds.n || field.grid.dim() != ds.d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "field " + o.field + " does not match the dataset's n/d");
    }
    return field;
  }
  ScoreField field = FitFromOptions(o, ds, inv, err);
  Emit(inv, o.field.empty() ? stem + ".field.json" : o.field,
       DumpJson(ScoreFieldToJson(field)));
  return field;
}

BootstrapConfig ResolveBootstrap(const Options& o, Invocation& inv) {
  BootstrapConfig cfg;
  cfg.alpha = o.boot.alpha;
  cfg.replicates = o.boot.replicates;
  cfg.seed = ResolveSeed(o.boot.seed);
  cfg.workers = o.workers;
  ValidateBootstrapConfig(cfg);
  inv.seed = cfg.seed;
  inv.config["alpha"] = cfg.alpha;
  inv.config["B"] = cfg.replicates;
  inv.config["seed"] = cfg.seed;
  return cfg;
}

std::vector<double> ParseNumberList(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "not a number: \"" + item + "\"");
    }
  }
  return out;
}

int CheckModel(int one_based, int n, const char* flag) {
  if (one_based < 1 || one_based > n) {
    throw Error(ErrorCode::kIndexOutOfRange,
                std::string(flag) + " " + std::to_string(one_based) +
                    " outside 1.." + std::to_string(n));
  }
  return one_based - 1;
}

void Simulate(const Options& o, Invocation& inv) {
  SimulationConfig cfg;
  cfg.n = o.n;
  cfg.d = o.d;
  cfg.p = o.p;
  cfg.L = o.L;
  cfg.seed = ResolveSeed(o.seed);
  cfg.workers = o.workers;
  switch (ParseScoreKind(o.score)) {
    case ScoreKind::kLinearSum:
      cfg.score = ScoreFunctionSpec::LinearSum(o.coef);
      break;
    case ScoreKind::kExpSum:
      cfg.score = ScoreFunctionSpec::ExpSum();
      break;
    case ScoreKind::kConstant:
      cfg.score = ScoreFunctionSpec::Constant(ParseNumberList(o.constants));
      break;
    case ScoreKind::kCustomTable: {
      if (o.table.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "--score table needs --table");
      }
      const std::string text = ReadTextFile(o.table);
      inv.inputs[o.table] = Sha256Hex(text);
      const Json j = ParseJson(text);
      try {
        cfg.score = ScoreFunctionSpec::CustomTable(
            j.at("points").get<std::vector<std::vector<double>>>(),
            j.at("scores").get<std::vector<std::vector<double>>>());
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kParseError,
                    "malformed score table: " + std::string(e.what()));
      }
      break;
    }
  }
  inv.seed = cfg.seed;
  inv.config["n"] = cfg.n;
  inv.config["d"] = cfg.d;
  inv.config["p"] = cfg.p;
  inv.config["L"] = cfg.L;
  inv.config["score"] = o.score;
  inv.config["coef"] = o.coef;
  if (!o.constants.empty()) inv.config["constants"] = o.constants;
  if (!o.table.empty()) inv.config["table"] = o.table;
  inv.config["seed"] = cfg.seed;
  inv.config["out"] = o.out;
  Emit(inv, o.out, DumpJson(DatasetToJson(SampleDataset(cfg))));
}

void Validate(const Options& o, std::ostream& out) {
  Invocation scratch;
  const ComparisonDataset ds = LoadDataset(o.dataset, scratch);
  const PlugInNormalizers plug = ComputePlugIns(ds);
  const Json summary = {{"ok", true},
                        {"n", ds.n},
                        {"d", ds.d},
                        {"edges", ds.edges.size()},
                        {"comparisons", EffectiveSampleSize(ds)},
                        {"p_hat", plug.p_hat},
                        {"l_bar", plug.l_bar}};
  out << summary.dump() << '\n';
}

void Estimate(const Options& o, Invocation& inv, std::ostream& err) {
  inv.config["dataset"] = o.dataset;
  const ComparisonDataset ds = LoadDataset(o.dataset, inv);
  const ScoreField field = FitFromOptions(o, ds, inv, err);
  inv.config["out"] = o.out;
  Emit(inv, o.out, DumpJson(ScoreFieldToJson(field)));
}

void Band(const Options& o, Invocation& inv, std::ostream& err) {
  const std::string stem = Stem(o.out);
  inv.config["dataset"] = o.dataset;
  const ComparisonDataset ds = LoadDataset(o.dataset, inv);
  const ScoreField field = ObtainField(o, ds, stem, inv, err);
  const BootstrapConfig boot = ResolveBootstrap(o, inv);
  inv.config["out"] = o.out;
  const ConfidenceBand band = BuildConfidenceBand(field, ds, boot);
  Emit(inv, stem + ".json", DumpJson(ConfidenceBandToJson(band)));
  Emit(inv, stem + ".csv", ConfidenceBandToCsv(band));
}

void Test(const Options& o, bool topk, Invocation& inv, std::ostream& out,
          std::ostream& err) {
  const std::string stem = Stem(o.out);
  inv.config["dataset"] = o.dataset;
  const ComparisonDataset ds = LoadDataset(o.dataset, inv);
  const int i = CheckModel(o.i, ds.n, "--i");
  inv.config["i"] = o.i;
  if (topk) {
    inv.config["k"] = o.k;
  } else {
    CheckModel(o.j, ds.n, "--j");
    inv.config["j"] = o.j;
  }
  const ScoreField field = ObtainField(o, ds, stem, inv, err);
  const BootstrapConfig boot = ResolveBootstrap(o, inv);
  inv.config["out"] = o.out;
  const TestResult result = topk ? TopKTest(i, o.k, field, ds, boot)
                                 : PairwiseTest(i, o.j - 1, field, ds, boot);
  const Json j = TestResultToJson(result);
  Emit(inv, stem + ".json", DumpJson(j));
  out << j.dump() << '\n';
}

void Diagram(const Options& o, Invocation& inv, std::ostream& err) {
  const std::string stem = Stem(o.out);
  inv.config["dataset"] = o.dataset;
  const ComparisonDataset ds = LoadDataset(o.dataset, inv);
  const ScoreField field = ObtainField(o, ds, stem, inv, err);
  const BootstrapConfig boot = ResolveBootstrap(o, inv);
  inv.config["out"] = o.out;
  const ConfidenceDiagram diagram = BuildDiagram(field, ds, boot);
  Emit(inv, stem + ".json", DumpJson(DiagramToJson(diagram)));
  Emit(inv, stem + ".dot", DiagramToDot(diagram));
}

SimulationConfig FigureSim(int n, double p, int L, ScoreFunctionSpec score,
                           std::uint64_t seed) {
  SimulationConfig sim;
  sim.n = n;
  sim.d = 3;
  sim.p = p;
  sim.L = L;
  sim.score = std::move(score);
  sim.seed = seed;
  return sim;
}

std::string StripWall(const ExperimentReport& report) {
  Json j = ReportToJson(report);
  j.erase("wall_seconds");
  return DumpJson(j);
}

void Reproduce(const Options& o, Invocation& inv, std::ostream& out) {
  if (o.figure < 1 || o.figure > 4) {
    throw Error(ErrorCode::kInvalidConfig, "--figure must be 1, 2, 3 or 4");
  }
  const std::uint64_t seed = ResolveSeed(o.seed);
  inv.seed = seed;
  static const int kDefaultReps[] = {0, 20, 50, 20, 50};
  const int reps = o.reps > 0 ? o.reps : kDefaultReps[o.figure];
  const int replicates = o.figure_replicates > 0
                             ? o.figure_replicates
                             : (o.figure == 2 ? 200 : 500);
  inv.config["figure"] = o.figure;
  inv.config["reps"] = reps;
  inv.config["B"] = replicates;
  inv.config["alpha"] = o.boot.alpha;
  inv.config["seed"] = seed;
  inv.config["out"] = o.out;
  fs::create_directories(o.out);
  const fs::path dir(o.out);
  BootstrapConfig boot;
  boot.replicates = replicates;
  boot.alpha = o.boot.alpha;
  ValidateBootstrapConfig(boot);
  Json summary = Json::object();

  if (o.figure == 1) {
    std::vector<MseScenario> scenarios;
    auto add = [&](const std::string& panel, int n, double p, int L) {
      MseScenario s;
      s.id = panel + ":n=" + std::to_string(n) + ",p=" + Json(p).dump() +
             ",L=" + std::to_string(L);
      s.sim = FigureSim(n, p, L, ScoreFunctionSpec::LinearSum(), seed);
      s.replications = reps;
      scenarios.push_back(s);
    };
    for (int n : {10, 20, 40}) {
      for (int L : {50, 100, 200}) add("A", n, 0.5, L);
    }
    for (double p : {0.2, 0.5, 0.8}) {
      for (int L : {50, 100, 200}) add("B", 20, p, L);
    }
    const std::vector<ExperimentReport> reports =
        RunMseSweep(scenarios, o.workers);
    Json all = Json::array();
    std::ostringstream csv;
    csv << "panel,n,p,L,mse_mean,mse_se\n";
    for (std::size_t s = 0; s < reports.size(); ++s) {
      Json j = ReportToJson(reports[s]);
      j.erase("wall_seconds");
      all.push_back(j);
      const AggregateStat& mse = reports[s].aggregates.at("mse");
      csv << scenarios[s].id.substr(0, 1) << ',' << scenarios[s].sim.n << ','
          << Json(scenarios[s].sim.p).dump() << ',' << scenarios[s].sim.L
          << ',' << Json(mse.mean).dump() << ',' << Json(mse.se).dump()
          << '\n';
      summary[scenarios[s].id] = mse.mean;
    }
    Emit(inv, (dir / "report.json").string(), DumpJson(all));
    Emit(inv, (dir / "mse.csv").string(), csv.str());
  } else if (o.figure == 2) {
    CoverageConfig cfg;
    cfg.id = "band-coverage";
    cfg.sim = FigureSim(10, 0.5, 200, ScoreFunctionSpec::LinearSum(), seed);
    cfg.replications = reps;
    cfg.bootstrap = boot;
    cfg.diagram = false;
    const ExperimentReport report = RunCoverageExperiment(cfg, o.workers);
    Emit(inv, (dir / "report.json").string(), StripWall(report));
    Emit(inv, (dir / "report.csv").string(), ReportToCsv(report));
    summary["band_coverage"] = report.aggregates.at("band_covered").mean;

    // One fitted band on an (x1, x2) slice at x3 = 0.4.
    SimulationConfig sim = cfg.sim;
    sim.seed = ReplicationSeed(seed, 0);
    sim.workers = o.workers;
    const ComparisonDataset ds = SampleDataset(sim);
    std::vector<std::vector<double>> points;
    for (int a = 0; a <= 10; ++a) {
      for (int b = 0; b <= 10; ++b) points.push_back({a / 10.0, b / 10.0, 0.4});
    }
    const EvalGrid grid = MakeGrid(GridSpec::Explicit(points), 3);
    const ScoreField field =
        FitField(grid, ds, DefaultEstimatorConfig(ds), o.workers);
    BootstrapConfig slice_boot = boot;
    slice_boot.seed = DeriveSeed(sim.seed, StreamTag::kMultiplier, {});
    slice_boot.workers = o.workers;
    const ConfidenceBand band = BuildConfidenceBand(field, ds, slice_boot);
    std::ostringstream csv;
    csv << "model,x1,x2,x3,lower,center,upper,truth\n";
    for (int m = 0; m < sim.n; ++m) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::vector<double> truth =
            TrueTheta(sim.score, sim.n, grid.point(g));
        csv << (m + 1);
        for (double v : grid.point(g)) csv << ',' << Json(v).dump();
        csv << ',' << Json(band.lower[g][m]).dump() << ','
            << Json(band.center[g][m]).dump() << ','
            << Json(band.upper[g][m]).dump() << ',' << Json(truth[m]).dump()
            << '\n';
      }
    }
    Emit(inv, (dir / "band_slice.csv").string(), csv.str());
  } else if (o.figure == 3) {
    SimulationConfig sim =
        FigureSim(20, 0.2, 100, ScoreFunctionSpec::ExpSum(), seed);
    CoverageConfig cfg;
    cfg.id = "diagram-shape";
    cfg.sim = sim;
    cfg.replications = reps;
    cfg.bootstrap = boot;
    cfg.band = false;
    const ExperimentReport report = RunCoverageExperiment(cfg, o.workers);
    Emit(inv, (dir / "report.json").string(), StripWall(report));
    Emit(inv, (dir / "report.csv").string(), ReportToCsv(report));
    summary["top_unique"] = report.aggregates.at("top_unique").mean;
    summary["diagram_coverage"] = report.aggregates.at("diagram_covered").mean;

    sim.seed = ReplicationSeed(seed, 0);
    sim.workers = o.workers;
    const ComparisonDataset ds = SampleDataset(sim);
    const EvalGrid grid = MakeGrid(GridSpec::Lattice(5), 3);
    const ScoreField field =
        FitField(grid, ds, DefaultEstimatorConfig(ds), o.workers);
    BootstrapConfig one = boot;
    one.seed = DeriveSeed(sim.seed, StreamTag::kMultiplier, {});
    one.workers = o.workers;
    const ConfidenceDiagram diagram = BuildDiagram(field, ds, one);
    Emit(inv, (dir / "diagram.json").string(),
         DumpJson(DiagramToJson(diagram)));
    Emit(inv, (dir / "diagram.dot").string(), DiagramToDot(diagram));
  } else {
    Json all = Json::object();
    for (int L : {50, 100}) {
      HeatmapConfig cfg;
      cfg.sim = FigureSim(20, 0.2, L, ScoreFunctionSpec::ExpSum(), seed);
      cfg.replications = reps;
      cfg.bootstrap = boot;
      cfg.bootstrap.workers = o.workers;
      const RankHeatmap heatmap = RankFrequencyHeatmap(cfg);
      Emit(inv, (dir / ("heatmap_L" + std::to_string(L) + ".csv")).string(),
           HeatmapToCsv(heatmap));
      double covered = 0.0;
      for (std::size_t m = 0; m < heatmap.freq.size(); ++m) {
        covered += heatmap.freq[m][heatmap.true_rank[m] - 1];
      }
      const std::string key = "L=" + std::to_string(L);
      all[key] = {{"freq", heatmap.freq}, {"true_rank", heatmap.true_rank}};
      summary[key + ":mean_true_rank_freq"] = covered / heatmap.freq.size();
    }
    Emit(inv, (dir / "report.json").string(), DumpJson(all));
  }
  out << summary.dump() << '\n';
}

void AddFitOptions(CLI::App* sub, FitOptions& fit) {
  sub->add_option("--grid", fit.grid,
                  "evaluation grid: lattice:R, inline JSON or a grid file")
      ->capture_default_str();
  sub->add_option("--h", fit.h, "kernel bandwidth; 0 selects the default")
      ->capture_default_str();
  sub->add_option("--lambda", fit.lambda,
                  "ridge weight; negative selects the default")
      ->capture_default_str();
  sub->add_option("--kernel", fit.kernel, "epanechnikov or uniform")
      ->capture_default_str();
  sub->add_option("--max-iters", fit.max_iters, "gradient descent cap")
      ->capture_default_str();
  sub->add_option("--grad-tol", fit.grad_tol, "stop when |grad|_inf <= tol")
      ->capture_default_str();
}

void AddBootOptions(CLI::App* sub, BootOptions& boot) {
  sub->add_option("--alpha", boot.alpha, "significance level")
      ->capture_default_str();
  sub->add_option("--B", boot.replicates, "bootstrap replicates")
      ->capture_default_str();
  sub->add_option("--seed", boot.seed,
                  "multiplier seed (RANKDIAG_SEED overrides)")
      ->capture_default_str();
}

void AddInferenceOptions(CLI::App* sub, Options& o) {
  sub->add_option("--dataset", o.dataset, "dataset JSON")->required();
  sub->add_option("--field", o.field,
                  "score field cache: loaded if present, written otherwise")
      ->capture_default_str();
  sub->add_option("--out", o.out, "output path prefix")->required();
  AddFitOptions(sub, o.fit);
  AddBootOptions(sub, o.boot);
}

int Replay(const Options& o, std::ostream& out, std::ostream& err,
           bool workers_given);

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  Options o;
  CLI::App app{"Contextual pairwise-comparison ranking with confidence "
               "diagrams",
               "rankdiag"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", ToolVersion());
  CLI::Option* workers_opt =
      app.add_option("--workers", o.workers,
                     "threads for grid fits and bootstrap replicates")
          ->capture_default_str();

  CLI::App* simulate = app.add_subcommand("simulate", "sample a dataset");
  simulate->add_option("--n", o.n, "models")->capture_default_str();
  simulate->add_option("--d", o.d, "prompt dimension")->capture_default_str();
  simulate->add_option("--p", o.p, "edge probability")->capture_default_str();
  simulate->add_option("--L", o.L, "comparisons per edge")
      ->capture_default_str();
  simulate->add_option("--score", o.score,
                       "linearsum, expsum, constant or table")
      ->capture_default_str();
  simulate->add_option("--coef", o.coef, "linearsum coefficient")
      ->capture_default_str();
  simulate->add_option("--constants", o.constants,
                       "comma-separated scores for --score constant");
  simulate->add_option("--table", o.table,
                       "JSON {points, scores} for --score table");
  simulate->add_option("--seed", o.seed, "seed (RANKDIAG_SEED overrides)")
      ->capture_default_str();
  simulate->add_option("--out", o.out, "dataset JSON to write")->required();

  CLI::App* validate = app.add_subcommand("validate", "check a dataset file");
  validate->add_option("dataset", o.dataset, "dataset JSON")->required();

  CLI::App* estimate = app.add_subcommand("estimate", "fit the score field");
  estimate->add_option("--dataset", o.dataset, "dataset JSON")->required();
  estimate->add_option("--out", o.out, "score field JSON to write")
      ->required();
  AddFitOptions(estimate, o.fit);

  CLI::App* band = app.add_subcommand("band", "simultaneous confidence band");
  AddInferenceOptions(band, o);

  CLI::App* pairwise =
      app.add_subcommand("test-pairwise", "H1: model i above model j at every x");
  AddInferenceOptions(pairwise, o);
  pairwise->add_option("--i", o.i, "model i (1-based)")->required();
  pairwise->add_option("--j", o.j, "model j (1-based)")->required();

  CLI::App* topk =
      app.add_subcommand("test-topk", "H1: model i in the top K at every x");
  AddInferenceOptions(topk, o);
  topk->add_option("--i", o.i, "model i (1-based)")->required();
  topk->add_option("--k", o.k, "K")->capture_default_str();

  CLI::App* diagram = app.add_subcommand("diagram", "confidence diagram");
  AddInferenceOptions(diagram, o);

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "synthetic study reports");
  reproduce->add_option("--figure", o.figure, "1, 2, 3 or 4")->required();
  reproduce->add_option("--reps", o.reps,
                        "replications; 0 selects the figure default")
      ->capture_default_str();
  reproduce->add_option("--B", o.figure_replicates,
                        "bootstrap replicates; 0 selects the figure default")
      ->capture_default_str();
  reproduce->add_option("--alpha", o.boot.alpha, "significance level")
      ->capture_default_str();
  reproduce->add_option("--seed", o.seed, "seed (RANKDIAG_SEED overrides)")
      ->capture_default_str();
  reproduce->add_option("--out", o.out, "output directory")->required();

  CLI::App* run = app.add_subcommand("run", "replay a run manifest");
  run->add_option("--manifest", o.manifest, "manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (o.workers < 1) {
    err << "--workers: must be >= 1\n";
    return kExitUsage;
  }

  Invocation inv;
  std::string manifest_path;
  if (simulate->parsed()) {
    inv.command = "simulate";
    Simulate(o, inv);
    manifest_path = Stem(o.out) + ".manifest.json";
  } else if (validate->parsed()) {
    Validate(o, out);
    return kExitOk;
  } else if (estimate->parsed()) {
    inv.command = "estimate";
    Estimate(o, inv, err);
    manifest_path = Stem(o.out) + ".manifest.json";
  } else if (band->parsed()) {
    inv.command = "band";
    Band(o, inv, err);
    manifest_path = Stem(o.out) + ".manifest.json";
  } else if (pairwise->parsed()) {
    inv.command = "test-pairwise";
    Test(o, false, inv, out, err);
    manifest_path = Stem(o.out) + ".manifest.json";
  } else if (topk->parsed()) {
    inv.command = "test-topk";
    Test(o, true, inv, out, err);
    manifest_path = Stem(o.out) + ".manifest.json";
  } else if (diagram->parsed()) {
    inv.command = "diagram";
    Diagram(o, inv, err);
    manifest_path = Stem(o.out) + ".manifest.json";
  } else if (reproduce->parsed()) {
    inv.command = "reproduce";
    Reproduce(o, inv, out);
    manifest_path = (fs::path(o.out) / "manifest.json").string();
  } else {
    return Replay(o, out, err, workers_opt->count() > 0);
  }
  WriteManifest(inv, manifest_path, args, o.workers);
  return kExitOk;
}

int Replay(const Options& o, std::ostream& out, std::ostream& err,
           bool workers_given) {
  const Json manifest = ParseJson(ReadTextFile(o.manifest));
  std::vector<std::string> argv;
  Json inputs;
  Json outputs;
  int workers = 1;
  try {
    for (const Json& a : manifest.at("replay")) {
      argv.push_back(a.get<std::string>());
    }
    inputs = manifest.at("inputs");
    outputs = manifest.at("outputs");
    workers = manifest.value("workers", 1);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError,
                "malformed manifest: " + std::string(e.what()));
  }
  for (const auto& [path, digest] : inputs.items()) {
    if (outputs.contains(path)) continue;  // a cache this run produced
    if (Sha256Hex(ReadTextFile(path)) != digest.get<std::string>()) {
      throw Error(ErrorCode::kIoError,
                  "input " + path + " changed since the manifest was written");
    }
  }
  if (workers_given) workers = o.workers;
  argv.insert(argv.begin(), {"--workers", std::to_string(workers)});
  const int code = Dispatch(argv, out, err);
  if (code != kExitOk) return code;
  Json check = Json::object();
  bool all_match = true;
  for (const auto& [path, digest] : outputs.items()) {
    const bool match =
        Sha256Hex(ReadTextFile(path)) == digest.get<std::string>();
    all_match = all_match && match;
    check[path] = match;
  }
  out << Json({{"replayed", argv}, {"identical", all_match}, {"outputs", check}})
             .dump()
      << '\n';
  return kExitOk;
}

}  // namespace

std::string ToolVersion() { return RANKDIAG_VERSION; }

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  try {
    return Dispatch(args, out, err);
  } catch (const Error& e) {
    err << Json({{"error", std::string(e.name())}, {"message", e.what()}})
               .dump()
        << '\n';
    return kExitDomainError;
  } catch (const fs::filesystem_error& e) {
    err << Json({{"error", std::string(ErrorName(ErrorCode::kIoError))},
                 {"message", e.what()}})
               .dump()
        << '\n';
    return kExitDomainError;
  }
}

}  // namespace rankdiag
