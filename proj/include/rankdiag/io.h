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

// File formats. Model indices are 1-based in every format and 0-based in
// memory; this module is the only place that converts.

#ifndef RANKDIAG_IO_H_
#define RANKDIAG_IO_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "rankdiag/bootstrap.h"
#include "rankdiag/core.h"
#include "rankdiag/diagram.h"
#include "rankdiag/estimator.h"
#include "rankdiag/experiments.h"
#include "rankdiag/inference.h"

namespace rankdiag {

using Json = nlohmann::ordered_json;

// Whole-file helpers; failures raise IoError.
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& contents);
std::string Sha256Hex(const std::string& bytes);

// Parses JSON text, raising ParseError with the reader's message.
Json ParseJson(const std::string& text);
// Two-space indented with a trailing newline.
std::string DumpJson(const Json& j);

Json DatasetToJson(const ComparisonDataset& ds);
// Structural decoding only; call ValidateDataset for domain checks.
ComparisonDataset DatasetFromJson(const Json& j);

Json GridSpecToJson(const GridSpec& spec);
GridSpec GridSpecFromJson(const Json& j);
// "lattice:R", inline JSON, or the path of a grid-spec JSON file.
GridSpec ParseGridArgument(const std::string& arg);

Json ScoreFieldToJson(const ScoreField& field);
ScoreField ScoreFieldFromJson(const Json& j);

// Header: model,point,x1..xd,lower,center,upper.
std::string ConfidenceBandToCsv(const ConfidenceBand& band);
Json ConfidenceBandToJson(const ConfidenceBand& band);

Json TestResultToJson(const TestResult& result);
Json BootstrapDrawsToJson(const BootstrapDraws& draws);

Json DiagramToJson(const ConfidenceDiagram& diagram);
ConfidenceDiagram DiagramFromJson(const Json& j);
// Nodes, level groups and edges all in ascending index order.
std::string DiagramToDot(const ConfidenceDiagram& diagram);

Json ReportToJson(const ExperimentReport& report);
// One line per replication; metric columns in name order.
std::string ReportToCsv(const ExperimentReport& report);

// Header: model,true_rank,rank_1..rank_n.
std::string HeatmapToCsv(const RankHeatmap& heatmap);

}  // namespace rankdiag

#endif  // RANKDIAG_IO_H_
