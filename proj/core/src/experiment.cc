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

#include "advgrasp/experiment.h"

#include <cstdio>
#include <sstream>

#include "advgrasp/checkpoint.h"
#include "advgrasp/dataset.h"
#include "advgrasp/errors.h"
#include "advgrasp/parallel.h"
#include "advgrasp/policy.h"
#include "advgrasp/report.h"
#include "advgrasp/rng.h"
#include "nlohmann/json.hpp"

namespace advgrasp {

namespace fs = std::filesystem;

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kTagInit = 0x1417;
constexpr std::uint64_t kTagBaseline = 0xba5e;
constexpr std::uint64_t kTagShake = 0x5ace;
constexpr std::uint64_t kTagSnatch = 0x5a7c;
constexpr std::uint64_t kTagEval = 0xe7a1;
constexpr std::uint64_t kTagProbeAdversary = 0x9a0b;
constexpr std::uint64_t kTagProbeRobustness = 0x9a0c;

struct Interrupted {};

class UnitBudget {
 public:
  explicit UnitBudget(int limit) : remaining_(limit) {}
  void Take() {
    if (remaining_ == 0) throw Interrupted{};
    if (remaining_ > 0) --remaining_;
  }

 private:
  int remaining_;
};

void Log(const RunOptions& options, const std::string& message) {
  if (options.log) options.log(message);
}

json StatsToJson(const TrainStats& s) {
  return {{"epochs", s.epochs}, {"accuracy", s.accuracy}, {"loss", s.loss}};
}

TrainStats StatsFromJson(const json& j) {
  return {j.at("epochs").get<int>(), j.at("accuracy").get<double>(),
          j.at("loss").get<double>()};
}

json ColumnToJson(const EvalColumn& c) {
  json objects = json::array();
  for (const ObjectTally& o : c.objects) {
    objects.push_back({{"object_seed", o.object_seed},
                       {"difficulty", DifficultyName(o.difficulty)},
                       {"successes", o.successes},
                       {"grasp_successes", o.grasp_successes},
                       {"tries", o.tries}});
  }
  return {{"regime", c.regime}, {"objects", objects}};
}

EvalColumn ColumnFromJson(const json& j) {
  EvalColumn c;
  c.regime = j.at("regime").get<std::string>();
  for (const json& o : j.at("objects")) {
    ObjectTally t;
    t.object_seed = o.at("object_seed").get<std::uint64_t>();
    t.difficulty = ParseDifficulty(o.at("difficulty").get<std::string>()).value();
    t.successes = o.at("successes").get<int>();
    t.grasp_successes = o.at("grasp_successes").get<int>();
    t.tries = o.at("tries").get<int>();
    c.objects.push_back(t);
  }
  return c;
}

json ProbesToJson(const ProbeResults& p) {
  return {{"probe_grasps", p.probe_grasps},
          {"random_dislodge_rate", p.random_dislodge_rate},
          {"best_dislodge_rate", p.best_dislodge_rate},
          {"trained_dislodge_rate", p.trained_dislodge_rate},
          {"robustness_successes", p.robustness_successes},
          {"robustness_dislodged", p.robustness_dislodged}};
}

ProbeResults ProbesFromJson(const json& j) {
  ProbeResults p;
  p.probe_grasps = j.at("probe_grasps").get<int>();
  p.random_dislodge_rate = j.at("random_dislodge_rate").get<double>();
  p.best_dislodge_rate = j.at("best_dislodge_rate").get<double>();
  p.trained_dislodge_rate = j.at("trained_dislodge_rate").get<std::vector<double>>();
  p.robustness_successes = j.at("robustness_successes").get<std::vector<int>>();
  p.robustness_dislodged = j.at("robustness_dislodged").get<std::vector<int>>();
  return p;
}

json ParseJsonFile(const fs::path& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

bool IsDone(const fs::path& dir) { return fs::exists(dir / "DONE"); }

void SaveUnit(const fs::path& dir, const ArmState& state, std::size_t fresh_begin) {
  fs::create_directories(dir);
  fs::remove(dir / "DONE");
  SaveDataset(std::span(state.records).subspan(fresh_begin), dir / "dataset.jsonl");
  SaveCheckpoint(state.protagonist, dir / "protagonist.ckpt");
  WriteFileAtomic(dir / "protagonist_targets.txt",
                  FormatTargets(state.last_protagonist_targets));
  if (state.adversary) {
    SaveCheckpoint(*state.adversary, dir / "adversary.ckpt");
    WriteFileAtomic(dir / "adversary_targets.txt",
                    FormatTargets(state.last_adversary_targets));
  }
  WriteFileAtomic(dir / "metrics.json", MetricsToJson(state.metrics.back()));
  WriteFileAtomic(dir / "DONE", "");
}

void LoadUnit(const fs::path& dir, ArmState& state) {
  std::vector<EpisodeRecord> fresh = LoadDataset(dir / "dataset.jsonl");
  state.records.insert(state.records.end(), std::make_move_iterator(fresh.begin()),
                       std::make_move_iterator(fresh.end()));
  state.protagonist = LoadCheckpoint(dir / "protagonist.ckpt");
  if (fs::exists(dir / "adversary.ckpt")) {
    state.adversary = LoadCheckpoint(dir / "adversary.ckpt");
  }
  state.metrics.push_back(MetricsFromJson(ReadFile(dir / "metrics.json")));
}

// Runs or reloads the iterations of one phase.
template <typename Step>
void RunPhase(ArmState& state, const fs::path& out, std::uint64_t seed,
              const std::string& phase, int iterations, const RunOptions& options,
              UnitBudget& budget, Step step) {
  for (int i = 0; i < iterations; ++i) {
    const fs::path dir = IterationDir(out, seed, phase, i);
    if (options.resume && IsDone(dir)) {
      LoadUnit(dir, state);
      state.completed_iterations = i + 1;
      continue;
    }
    budget.Take();
    Log(options, "seed " + std::to_string(seed) + ": " + phase + " iteration " +
                     std::to_string(i));
    const std::size_t before = state.records.size();
    step(state);
    SaveUnit(dir, state, before);
  }
}

struct ProbeGrasp {
  const ObjectShape* object;
  GraspAction grasp;
  GraspOutcome outcome;
  Patch rotated;
};

ProbeResults ComputeProbes(const ExperimentConfig& config, const Environment& env,
                           std::uint64_t seed, const Network& initial,
                           const std::vector<Network>& protagonists,
                           const std::vector<Network>& adversaries) {
  ProbeResults p;
  const int want = config.probes.adversary_probe_grasps;
  constexpr int kBlock = 64;
  const int max_scenes = 200 * want;
  std::vector<ProbeGrasp> grasps;
  for (int start = 0; static_cast<int>(grasps.size()) < want && start < max_scenes;
       start += kBlock) {
    std::vector<std::optional<ProbeGrasp>> block(kBlock);
    ParallelFor(kBlock, [&](int b) {
      const std::uint64_t s =
          DeriveSeed(seed, {kTagProbeAdversary, static_cast<std::uint64_t>(start + b)});
      Rng rng(s);
      const ObjectShape& object = env.objects[rng.Below(env.objects.size())];
      const Scene scene = PlaceObject(object, DeriveSeed(s, {1}));
      const Image image = RenderScene(scene);
      const auto candidates = SampleCandidates(image, env.n_candidates, DeriveSeed(s, {2}));
      const GraspAction grasp =
          SelectGrasp(ProbabilityMatrix(initial, image, candidates),
                      SelectionMode::Importance(config.game.importance_beta),
                      DeriveSeed(s, {3}));
      const GraspOutcome outcome = GraspMargin(object, scene.pose, grasp, env.sim);
      if (!outcome.success) return;
      block[b] = ProbeGrasp{&object, grasp, outcome,
                            ExtractRotatedPatch(image, grasp.center(), grasp.angle())};
    });
    for (auto& g : block) {
      if (g && static_cast<int>(grasps.size()) < want) grasps.push_back(std::move(*g));
    }
  }
  p.probe_grasps = static_cast<int>(grasps.size());
  if (grasps.empty()) throw RuntimeAbort("adversary probe found no successful grasp");

  double random_sum = 0.0;
  int any_dislodged = 0;
  for (const ProbeGrasp& g : grasps) {
    int dislodged = 0;
    for (int a = 0; a < kNumShakeActions; ++a) {
      dislodged += ApplyShake(g.outcome, g.grasp, *g.object, env.sim,
                              {AdversaryKind::kShake, a});
    }
    random_sum += static_cast<double>(dislodged) / kNumShakeActions;
    any_dislodged += dislodged > 0;
  }
  p.random_dislodge_rate = random_sum / grasps.size();
  p.best_dislodge_rate = static_cast<double>(any_dislodged) / grasps.size();
  for (const Network& adversary : adversaries) {
    int dislodged = 0;
    for (const ProbeGrasp& g : grasps) {
      const AdversaryAction a = SelectAdversary(adversary, g.rotated, kNumShakeActions,
                                                SelectionMode::Greedy(), 0);
      dislodged += ApplyShake(g.outcome, g.grasp, *g.object, env.sim, a);
    }
    p.trained_dislodge_rate.push_back(static_cast<double>(dislodged) / grasps.size());
  }

  const Network& final_adversary = adversaries.back();
  const int scenes = config.probes.robustness_probe_scenes;
  for (const Network& protagonist : protagonists) {
    std::vector<char> success(scenes), dislodged(scenes);
    ParallelFor(scenes, [&](int k) {
      const std::uint64_t s =
          DeriveSeed(seed, {kTagProbeRobustness, static_cast<std::uint64_t>(k)});
      Rng rng(s);
      const ObjectShape& object = env.objects[rng.Below(env.objects.size())];
      const Scene scene = PlaceObject(object, DeriveSeed(s, {1}));
      const Image image = RenderScene(scene);
      const auto candidates = SampleCandidates(image, env.n_candidates, DeriveSeed(s, {2}));
      const GraspAction grasp = SelectGrasp(
          ProbabilityMatrix(protagonist, image, candidates), SelectionMode::Greedy(), 0);
      const GraspOutcome outcome = GraspMargin(object, scene.pose, grasp, env.sim);
      if (!outcome.success) return;
      success[k] = 1;
      const Patch rotated = ExtractRotatedPatch(image, grasp.center(), grasp.angle());
      const AdversaryAction a = SelectAdversary(final_adversary, rotated, kNumShakeActions,
                                                SelectionMode::Greedy(), 0);
      dislodged[k] = ApplyShake(outcome, grasp, object, env.sim, a);
    });
    int n_success = 0, n_dislodged = 0;
    for (int k = 0; k < scenes; ++k) {
      n_success += success[k];
      n_dislodged += dislodged[k];
    }
    p.robustness_successes.push_back(n_success);
    p.robustness_dislodged.push_back(n_dislodged);
  }
  return p;
}

void RunSeed(const ExperimentConfig& config, const fs::path& out, std::uint64_t seed,
             const RunOptions& options, UnitBudget& budget) {
  const Environment env = TrainingEnvironment(config);
  const GameConfig& game = config.game;
  const auto wants = [&](const char* arm) {
    return config.HasArm(arm) && (!options.arm || *options.arm == arm);
  };
  const bool run_baseline = wants(kArmBaseline);
  const bool run_snatch = wants(kArmShakeSnatch);
  const bool run_shake = wants(kArmShake) || run_snatch;
  const std::string tag = "seed " + std::to_string(seed) + ": ";

  ArmState init;
  const fs::path init_dir = InitDir(out, seed);
  if (options.resume && IsDone(init_dir)) {
    LoadUnit(init_dir, init);
  } else {
    budget.Take();
    Log(options, tag + "initial protagonist");
    init = InitializeProtagonist(env, game, DeriveSeed(seed, {kTagInit}));
    SaveUnit(init_dir, init, 0);
  }

  std::vector<std::pair<std::string, fs::path>> nets{{"init", init_dir}};

  if (run_baseline) {
    ArmState state = init;
    const std::vector<int> schedule = BaselineSchedule(config);
    RunPhase(state, out, seed, kArmBaseline, game.iterations, options, budget,
             [&](ArmState& s) {
               RunBaselineIteration(s, env, game,
                                    schedule[static_cast<std::size_t>(s.completed_iterations)],
                                    DeriveSeed(seed, {kTagBaseline}));
             });
    for (int i = 0; i < game.iterations; ++i) {
      nets.emplace_back("baseline-" + std::to_string(i),
                        IterationDir(out, seed, kArmBaseline, i));
    }
  }

  if (run_shake) {
    ArmState state = init;
    BeginAdversaryPhase(state, AdversaryKind::kShake);
    RunPhase(state, out, seed, "shake", game.iterations, options, budget,
             [&](ArmState& s) {
               RunAdversarialIteration(s, env, game, DeriveSeed(seed, {kTagShake}));
             });
    for (int i = 0; i < game.iterations; ++i) {
      nets.emplace_back("shake-" + std::to_string(i), IterationDir(out, seed, "shake", i));
    }
    if (run_snatch) {
      GameConfig snatch_game = game;
      snatch_game.iterations = config.snatch_iterations;
      snatch_game.grasps_per_iteration = config.snatch_grasps_per_iteration;
      BeginAdversaryPhase(state, AdversaryKind::kSnatch);
      RunPhase(state, out, seed, "snatch", snatch_game.iterations, options, budget,
               [&](ArmState& s) {
                 RunAdversarialIteration(s, env, snatch_game,
                                         DeriveSeed(seed, {kTagSnatch}));
               });
      for (int i = 0; i < snatch_game.iterations; ++i) {
        nets.emplace_back("snatch-" + std::to_string(i),
                          IterationDir(out, seed, "snatch", i));
      }
    }
  }

  const fs::path seed_dir = SeedDir(out, seed);
  if (run_shake && !(options.resume && fs::exists(seed_dir / "probes.json"))) {
    Log(options, tag + "probes");
    std::vector<Network> protagonists, adversaries;
    for (int i = 0; i < game.iterations; ++i) {
      const fs::path dir = IterationDir(out, seed, "shake", i);
      protagonists.push_back(LoadCheckpoint(dir / "protagonist.ckpt"));
      adversaries.push_back(LoadCheckpoint(dir / "adversary.ckpt"));
    }
    const ProbeResults probes = ComputeProbes(
        config, env, seed, LoadCheckpoint(init_dir / "protagonist.ckpt"), protagonists,
        adversaries);
    WriteFileAtomic(seed_dir / "probes.json", ProbesToJson(probes).dump(2) + "\n");
  }

  if (!(options.resume && fs::exists(seed_dir / "eval.json"))) {
    Log(options, tag + "evaluation");
    const std::vector<ObjectShape> objects =
        MakeObjectPool(config.objects.eval, config.objects.eval_seed);
    std::vector<Network> protagonists;
    for (const auto& entry : nets) {
      protagonists.push_back(LoadCheckpoint(entry.second / "protagonist.ckpt"));
    }
    json regimes = json::object();
    for (const RegimeSpec& regime : config.eval_regimes) {
      const std::vector<EvalColumn> columns =
          EvaluateAll(protagonists, objects, regime, config.sim,
                      config.tries_per_object, DeriveSeed(seed, {kTagEval}));
      json list = json::array();
      for (std::size_t j = 0; j < nets.size(); ++j) {
        list.push_back({{"label", nets[j].first}, {"column", ColumnToJson(columns[j])}});
      }
      regimes[regime.name] = list;
    }
    WriteFileAtomic(seed_dir / "eval.json", json{{"regimes", regimes}}.dump(2) + "\n");
  }
}

}  // namespace

const EvalColumn* SeedResult::Column(const std::string& regime,
                                     const std::string& label) const {
  auto it = eval.find(regime);
  if (it == eval.end()) return nullptr;
  for (const LabeledColumn& c : it->second) {
    if (c.label == label) return &c.column;
  }
  return nullptr;
}

fs::path SeedDir(const fs::path& out, std::uint64_t seed) {
  return out / ("seed_" + std::to_string(seed));
}

fs::path InitDir(const fs::path& out, std::uint64_t seed) {
  return SeedDir(out, seed) / "init";
}

fs::path IterationDir(const fs::path& out, std::uint64_t seed,
                      const std::string& phase, int iteration) {
  return SeedDir(out, seed) / phase / ("iter_" + std::to_string(iteration));
}

std::vector<int> BaselineSchedule(const ExperimentConfig& config) {
  const int extra = config.BaselineBudget() - config.game.init_random_grasps;
  const int n = config.game.iterations;
  std::vector<int> schedule(static_cast<std::size_t>(n), extra / n);
  for (int i = 0; i < extra % n; ++i) ++schedule[static_cast<std::size_t>(i)];
  return schedule;
}

Environment TrainingEnvironment(const ExperimentConfig& config) {
  Environment env;
  env.sim = config.sim;
  env.objects = MakeObjectPool(config.objects.train, config.objects.train_seed);
  env.n_candidates = config.train_candidates;
  return env;
}

std::string FormatTargets(const std::vector<TrainingSample>& samples) {
  std::string text;
  char buf[64];
  for (const TrainingSample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%d %.17g\n", s.target_index, s.target_value);
    text += buf;
  }
  return text;
}

std::vector<double> ParseTargets(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  int index;
  double value;
  while (in >> index >> value) values.push_back(value);
  return values;
}

std::string MetricsToJson(const IterationMetrics& m) {
  const json j = {{"phase", m.phase},
                  {"iteration", m.iteration},
                  {"attempts", m.attempts},
                  {"successes", m.successes},
                  {"adversary_attempts", m.adversary_attempts},
                  {"dislodged", m.dislodged},
                  {"total_records", m.total_records},
                  {"protagonist_samples", m.protagonist_samples},
                  {"adversary_samples", m.adversary_samples},
                  {"protagonist_train", StatsToJson(m.protagonist_train)},
                  {"adversary_train", StatsToJson(m.adversary_train)}};
  return j.dump(2) + "\n";
}

IterationMetrics MetricsFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    IterationMetrics m;
    m.phase = j.at("phase").get<std::string>();
    m.iteration = j.at("iteration").get<int>();
    m.attempts = j.at("attempts").get<int>();
    m.successes = j.at("successes").get<int>();
    m.adversary_attempts = j.at("adversary_attempts").get<int>();
    m.dislodged = j.at("dislodged").get<int>();
    m.total_records = j.at("total_records").get<std::size_t>();
    m.protagonist_samples = j.at("protagonist_samples").get<std::size_t>();
    m.adversary_samples = j.at("adversary_samples").get<std::size_t>();
    m.protagonist_train = StatsFromJson(j.at("protagonist_train"));
    m.adversary_train = StatsFromJson(j.at("adversary_train"));
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("metrics: ") + e.what());
  }
}

SeedResult LoadSeedResult(const fs::path& out, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;
  const fs::path dir = SeedDir(out, seed);
  try {
    const json eval = ParseJsonFile(dir / "eval.json");
    for (const auto& [regime, list] : eval.at("regimes").items()) {
      for (const json& entry : list) {
        result.eval[regime].push_back(
            {entry.at("label").get<std::string>(), ColumnFromJson(entry.at("column"))});
      }
    }
    if (fs::exists(dir / "probes.json")) {
      result.probes = ProbesFromJson(ParseJsonFile(dir / "probes.json"));
    }
  } catch (const json::exception& e) {
    throw FormatError(dir.string() + ": " + e.what());
  }
  if (fs::exists(InitDir(out, seed) / "metrics.json")) {
    result.metrics["init"].push_back(
        MetricsFromJson(ReadFile(InitDir(out, seed) / "metrics.json")));
  }
  for (const char* phase : {"baseline", "shake", "snatch"}) {
    for (int i = 0;; ++i) {
      const fs::path unit = IterationDir(out, seed, phase, i);
      if (!IsDone(unit)) break;
      result.metrics[phase].push_back(MetricsFromJson(ReadFile(unit / "metrics.json")));
    }
  }
  return result;
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const fs::path& out,
                               const RunOptions& options) {
  ValidateExperimentConfig(config);
  if (options.arm && !config.HasArm(*options.arm)) {
    throw ConfigError("arms", "arm '" + *options.arm + "' is not configured");
  }
  fs::create_directories(out);
  WriteFileAtomic(out / "config.json", ExperimentConfigToJson(config));
  UnitBudget budget(options.max_new_units);
  ExperimentResult result;
  try {
    for (std::uint64_t seed : config.seeds) {
      if (options.seed && *options.seed != seed) continue;
      RunSeed(config, out, seed, options, budget);
    }
  } catch (const Interrupted&) {
    Log(options, "stopped before completion");
    return result;
  }
  for (std::uint64_t seed : config.seeds) {
    if (fs::exists(SeedDir(out, seed) / "eval.json")) {
      result.seeds.push_back(LoadSeedResult(out, seed));
    }
  }
  EmitReport(config, result, out);
  result.complete = true;
  return result;
}

}  // namespace advgrasp
