// Copyright 2026 The advgrasp Authors
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

#ifndef ADVGRASP_REPORT_H_
#define ADVGRASP_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "advgrasp/config.h"
#include "advgrasp/experiment.h"

namespace advgrasp {

// Per-object success counts of one seed and regime; one column per
// evaluated protagonist.
struct ResultsTable {
  std::uint64_t seed = 0;
  std::string regime;
  int tries = 0;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<int>> successes;  // [row][column]

  int ColumnSuccesses(std::size_t column) const;
  int ColumnTries() const;
  double Overall(std::size_t column) const;  // successes / (rows * tries)
};

std::vector<ResultsTable> BuildResultsTables(const SeedResult& seed);

std::string FormatTextTables(const ExperimentConfig& config,
                             const std::vector<SeedResult>& seeds);
std::string FormatCsvTables(const std::vector<SeedResult>& seeds);

struct PlotSeries {
  std::string name;
  std::vector<double> values;  // indexed by iteration; NaN skips a point
};

// Line chart with a [0, 1] value axis, written as PNG.
void WriteLinePlot(const std::filesystem::path& path, const std::string& title,
                   const std::vector<PlotSeries>& series);

// results.txt, results.csv, success_vs_iteration.png and
// dislodge_vs_iteration.png under `out`.
void EmitReport(const ExperimentConfig& config, const ExperimentResult& result,
                const std::filesystem::path& out);

}  // namespace advgrasp

#endif  // ADVGRASP_REPORT_H_
