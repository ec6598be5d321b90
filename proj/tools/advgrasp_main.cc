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

// advgrasp: collect, train, evaluate and run the adversarial grasping
// experiment from the command line.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advgrasp/checkpoint.h"
#include "advgrasp/config.h"
#include "advgrasp/dataset.h"
#include "advgrasp/errors.h"
#include "advgrasp/evaluate.h"
#include "advgrasp/experiment.h"
#include "advgrasp/game_trainer.h"
#include "advgrasp/report.h"
#include "advgrasp/rng.h"

namespace fs = std::filesystem;

namespace advgrasp {
namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

struct Flags {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  std::string arm;
  bool resume = false;
  std::optional<std::uint64_t> only_seed;
  int n = 0;
  int iteration = 0;
  std::string kind;
  std::string regime = "low";
  std::string protagonist;
  std::string adversary;
  std::string init;
  std::vector<std::string> datasets;
};

ExperimentConfig ConfigFrom(const Flags& f) {
  return f.config.empty() ? ExperimentConfig{} : LoadExperimentConfig(f.config);
}

AdversaryKind KindFrom(const std::string& name) {
  const auto kind = ParseAdversaryKind(name);
  if (!kind) throw ConfigError("kind", "expected shake or snatch, got '" + name + "'");
  return *kind;
}

std::vector<EpisodeRecord> LoadAll(const std::vector<std::string>& paths) {
  std::vector<EpisodeRecord> records;
  for (const std::string& p : paths) {
    std::vector<EpisodeRecord> part = LoadDataset(p);
    records.insert(records.end(), part.begin(), part.end());
  }
  return records;
}

void PrintStats(const char* what, const TrainStats& s, std::size_t samples) {
  std::printf("%s: %zu samples, %d epochs, balanced accuracy %.4f, loss %.4f\n", what,
              samples, s.epochs, s.accuracy, s.loss);
}

int Collect(const Flags& f) {
  const ExperimentConfig config = ConfigFrom(f);
  if (f.n < 1) throw ConfigError("n", "must be >= 1");
  const Environment env = TrainingEnvironment(config);
  std::optional<Network> protagonist, adversary;
  if (!f.protagonist.empty()) protagonist = LoadCheckpoint(f.protagonist);
  if (!f.adversary.empty()) adversary = LoadCheckpoint(f.adversary);
  CollectOptions options;
  options.protagonist = protagonist ? &*protagonist : nullptr;
  options.grasp_mode = SelectionMode::Importance(config.game.importance_beta);
  if (!f.kind.empty()) options.adversary_kind = KindFrom(f.kind);
  options.adversary = adversary ? &*adversary : nullptr;
  options.iteration = f.iteration;
  const std::vector<EpisodeRecord> records = advgrasp::Collect(env, f.n, options, f.seed);
  SaveDataset(records, f.out);
  int successes = 0, dislodged = 0;
  for (const EpisodeRecord& r : records) {
    successes += r.grasp_success;
    dislodged += r.adversary_success.value_or(false);
  }
  std::printf("%d episodes, %d successful grasps, %d dislodged -> %s\n", f.n, successes,
              dislodged, f.out.c_str());
  return 0;
}

int TrainProtagonist(const Flags& f) {
  const ExperimentConfig config = ConfigFrom(f);
  const std::vector<EpisodeRecord> records = LoadAll(f.datasets);
  Network net = f.init.empty() ? InitNetwork(kNumAngleBins, f.seed) : LoadCheckpoint(f.init);
  std::optional<Network> adversary;
  if (!f.adversary.empty()) adversary = LoadCheckpoint(f.adversary);
  const std::vector<TrainingSample> samples = MakeProtagonistTargets(
      records, adversary ? &*adversary : nullptr, config.game.alpha);
  const TrainStats stats = TrainNetwork(net, samples, config.game, f.seed);
  SaveCheckpoint(net, f.out);
  PrintStats("protagonist", stats, samples.size());
  return 0;
}

int TrainAdversary(const Flags& f) {
  const ExperimentConfig config = ConfigFrom(f);
  const AdversaryKind kind = KindFrom(f.kind);
  const std::vector<EpisodeRecord> records = LoadAll(f.datasets);
  Network net = f.init.empty() ? InitNetwork(NumActions(kind), f.seed) : LoadCheckpoint(f.init);
  const std::vector<TrainingSample> samples = MakeAdversaryTargets(records, kind);
  if (samples.empty()) throw RuntimeAbort("datasets hold no " + f.kind + " attempts");
  const TrainStats stats = TrainNetwork(net, samples, config.game, f.seed);
  SaveCheckpoint(net, f.out);
  PrintStats("adversary", stats, samples.size());
  return 0;
}

int JointTrainCommand(const Flags& f) {
  const ExperimentConfig config = ConfigFrom(f);
  const AdversaryKind kind = KindFrom(f.kind.empty() ? "shake" : f.kind);
  const Environment env = TrainingEnvironment(config);
  const JointResult result = JointTrain(env, config.game, kind, f.seed);
  for (std::size_t i = 0; i < result.protagonists.size(); ++i) {
    const fs::path dir = fs::path(f.out) / ("iter_" + std::to_string(i));
    SaveCheckpoint(result.protagonists[i], dir / "protagonist.ckpt");
    SaveCheckpoint(result.adversaries[i], dir / "adversary.ckpt");
    WriteFileAtomic(dir / "metrics.json", MetricsToJson(result.metrics[i]));
    const IterationMetrics& m = result.metrics[i];
    std::printf("iteration %zu: grasp success %.3f, dislodge rate %.3f, %zu records\n", i,
                m.grasp_success_rate(), m.dislodge_rate(), m.total_records);
  }
  return 0;
}

int EvaluateCommand(const Flags& f) {
  const ExperimentConfig config = ConfigFrom(f);
  std::optional<RegimeSpec> regime;
  for (const RegimeSpec& r : config.eval_regimes) {
    if (r.name == f.regime) regime = r;
  }
  if (!regime) throw ConfigError("regime", "no evaluation regime named '" + f.regime + "'");
  const std::vector<ObjectShape> objects =
      MakeObjectPool(config.objects.eval, config.objects.eval_seed);
  const EvalColumn column = Evaluate(LoadCheckpoint(f.protagonist), objects, *regime,
                                     config.sim, config.tries_per_object, f.seed);
  for (std::size_t i = 0; i < column.objects.size(); ++i) {
    const ObjectTally& o = column.objects[i];
    std::printf("%-8s %016llx  %2d/%d lifted  %2d/%d grasped\n",
                std::string(DifficultyName(o.difficulty)).c_str(),
                static_cast<unsigned long long>(o.object_seed), o.successes, o.tries,
                o.grasp_successes, o.tries);
  }
  std::printf("overall %d/%d (%.1f%%)\n", column.successes(), column.tries(),
              100.0 * column.overall());
  return 0;
}

int RunExperimentCommand(const Flags& f) {
  const ExperimentConfig config = ConfigFrom(f);
  RunOptions options;
  options.resume = f.resume;
  if (!f.arm.empty()) options.arm = f.arm;
  options.seed = f.only_seed;
  options.log = [](const std::string& m) { std::fprintf(stderr, "[advgrasp] %s\n", m.c_str()); };
  const ExperimentResult result = RunExperiment(config, f.out, options);
  std::printf("%s", ReadFile(fs::path(f.out) / "results.txt").c_str());
  return result.complete ? 0 : 1;
}

int ReportCommand(const Flags& f) {
  const ExperimentConfig config =
      f.config.empty() ? LoadExperimentConfig(fs::path(f.out) / "config.json") : ConfigFrom(f);
  ExperimentResult result;
  for (std::uint64_t seed : config.seeds) {
    if (fs::exists(SeedDir(f.out, seed) / "eval.json")) {
      result.seeds.push_back(LoadSeedResult(f.out, seed));
    }
  }
  EmitReport(config, result, f.out);
  std::printf("%s", FormatTextTables(config, result.seeds).c_str());
  return 0;
}

}  // namespace
}  // namespace advgrasp

int main(int argc, char** argv) {
  using namespace advgrasp;
  CLI::App app{"Adversarial self-supervised planar grasping"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&](CLI::App* sub, bool need_out) {
    sub->add_option("--config", f.config, "Experiment config (JSON)");
    sub->add_option("--seed", f.seed, "Random seed");
    auto* out = sub->add_option("--out", f.out, "Output path");
    if (need_out) out->required();
  };

  auto* collect = app.add_subcommand("collect", "Collect grasp episodes");
  common(collect, true);
  collect->add_option("--n", f.n, "Number of episodes")->required();
  collect->add_option("--protagonist", f.protagonist, "Protagonist checkpoint");
  collect->add_option("--adversary", f.adversary, "Adversary checkpoint");
  collect->add_option("--kind", f.kind, "Adversary kind: shake or snatch");
  collect->add_option("--iteration", f.iteration, "Iteration tag for the records");

  auto* train_p = app.add_subcommand("train-protagonist", "Train a grasp network");
  common(train_p, true);
  train_p->add_option("--dataset", f.datasets, "Dataset files")->required();
  train_p->add_option("--init", f.init, "Warm-start checkpoint");
  train_p->add_option("--adversary", f.adversary, "Adversary for soft labels");

  auto* train_a = app.add_subcommand("train-adversary", "Train an adversary network");
  common(train_a, true);
  train_a->add_option("--dataset", f.datasets, "Dataset files")->required();
  train_a->add_option("--kind", f.kind, "shake or snatch")->required();
  train_a->add_option("--init", f.init, "Warm-start checkpoint");

  auto* joint = app.add_subcommand("joint-train", "Run one adversarial schedule");
  common(joint, true);
  joint->add_option("--kind", f.kind, "shake or snatch");

  auto* eval = app.add_subcommand("evaluate", "Evaluate a protagonist on held-out objects");
  common(eval, false);
  eval->add_option("--protagonist", f.protagonist, "Protagonist checkpoint")->required();
  eval->add_option("--regime", f.regime, "Evaluation regime name");

  auto* run = app.add_subcommand("run-experiment", "Run every arm and seed");
  run->add_option("--config", f.config, "Experiment config (JSON)");
  run->add_option("--out", f.out, "Artifact directory")->required();
  run->add_option("--seed", f.only_seed, "Run a single seed");
  run->add_option("--arm", f.arm, "Run a single arm");
  run->add_flag("--resume", f.resume, "Skip completed iterations");

  auto* report = app.add_subcommand("report", "Rebuild tables and plots");
  report->add_option("--config", f.config, "Experiment config (JSON)");
  report->add_option("--out", f.out, "Artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (collect->parsed()) return Collect(f);
    if (train_p->parsed()) return TrainProtagonist(f);
    if (train_a->parsed()) return TrainAdversary(f);
    if (joint->parsed()) return JointTrainCommand(f);
    if (eval->parsed()) return EvaluateCommand(f);
    if (run->parsed()) return RunExperimentCommand(f);
    if (report->parsed()) return ReportCommand(f);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const RuntimeAbort& e) {
    std::fprintf(stderr, "aborted: %s\n", e.what());
    return kExitAbort;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
