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

#ifndef ADVGRASP_EXPERIMENT_H_
#define ADVGRASP_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advgrasp/config.h"
#include "advgrasp/evaluate.h"
#include "advgrasp/game_trainer.h"

namespace advgrasp {

// Adversary probes on one seed.
struct ProbeResults {
  // Successful grasps of the initial protagonist on fresh scenes.
  int probe_grasps = 0;
  // Mean over probe grasps of the fraction of shake actions that dislodge;
  // the exact expectation of a uniformly random shake.
  double random_dislodge_rate = 0.0;
  // Fraction of probe grasps that at least one shake action dislodges; the
  // ceiling for any shake policy.
  double best_dislodge_rate = 0.0;
  // Greedy action of the shake adversary after each shake iteration.
  std::vector<double> trained_dislodge_rate;
  // Final shake adversary (greedy) against greedy grasps of the protagonist
  // after each shake iteration, on a fixed scene set.
  std::vector<int> robustness_successes;
  std::vector<int> robustness_dislodged;

  double robustness_rate(std::size_t i) const {
    return robustness_successes[i]
               ? static_cast<double>(robustness_dislodged[i]) / robustness_successes[i]
               : 0.0;
  }
};

struct LabeledColumn {
  std::string label;  // init, baseline-<i>, shake-<i>, snatch-<i>
  EvalColumn column;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::map<std::string, std::vector<LabeledColumn>> eval;  // keyed by regime
  std::optional<ProbeResults> probes;
  // Keyed by phase: init, baseline, shake, snatch.
  std::map<std::string, std::vector<IterationMetrics>> metrics;

  const EvalColumn* Column(const std::string& regime, const std::string& label) const;
};

struct RunOptions {
  bool resume = false;
  std::optional<std::string> arm;       // run only this arm (and what it needs)
  std::optional<std::uint64_t> seed;    // run only this seed
  // Stop after this many newly trained units (init or one iteration);
  // negative runs to completion.
  int max_new_units = -1;
  std::function<void(const std::string&)> log;
};

struct ExperimentResult {
  bool complete = false;
  std::vector<SeedResult> seeds;
};

// Trains every arm for every seed under `out`, evaluates, probes and writes
// the report. Each finished unit is marked with a DONE file; with
// `resume` set, marked units are loaded instead of recomputed.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const std::filesystem::path& out,
                               const RunOptions& options = {});

// Reads the evaluation, probe and metric artifacts of a finished seed.
SeedResult LoadSeedResult(const std::filesystem::path& out, std::uint64_t seed);

std::filesystem::path SeedDir(const std::filesystem::path& out, std::uint64_t seed);
std::filesystem::path IterationDir(const std::filesystem::path& out,
                                   std::uint64_t seed, const std::string& phase,
                                   int iteration);
std::filesystem::path InitDir(const std::filesystem::path& out, std::uint64_t seed);

// Splits the baseline's extra grasps over its iterations.
std::vector<int> BaselineSchedule(const ExperimentConfig& config);

// Environment used for training episodes.
Environment TrainingEnvironment(const ExperimentConfig& config);

// Text form of trainer targets, one "%.17g" value per line.
std::string FormatTargets(const std::vector<TrainingSample>& samples);
std::vector<double> ParseTargets(const std::string& text);

std::string MetricsToJson(const IterationMetrics& m);
IterationMetrics MetricsFromJson(const std::string& text);

}  // namespace advgrasp

#endif  // ADVGRASP_EXPERIMENT_H_
