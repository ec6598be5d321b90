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

#include "advgrasp/game_trainer.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "advgrasp/errors.h"
#include "advgrasp/parallel.h"
#include "advgrasp/rng.h"

namespace advgrasp {

namespace {

enum SeedTag : std::uint64_t {
  kTagPool = 0x9001,
  kTagEpisode,
  kTagScene,
  kTagCandidates,
  kTagGraspPick,
  kTagAdversaryPick,
  kTagInitData,
  kTagInitNet,
  kTagInitTrain,
  kTagCollect,
  kTagTrainAdversary,
  kTagTrainProtagonist,
  kTagAdversaryNet,
  kTagShuffle,
};

}  // namespace

std::vector<ObjectShape> MakeObjectPool(const ObjectCounts& counts,
                                        std::uint64_t seed) {
  std::vector<ObjectShape> pool;
  const std::pair<Difficulty, int> groups[] = {{Difficulty::kEasy, counts.easy},
                                               {Difficulty::kMedium, counts.medium},
                                               {Difficulty::kHard, counts.hard}};
  for (const auto& [difficulty, count] : groups) {
    for (int i = 0; i < count; ++i) {
      pool.push_back(GenerateObject(
          DeriveSeed(seed, {kTagPool, static_cast<std::uint64_t>(difficulty),
                            static_cast<std::uint64_t>(i)}),
          difficulty));
    }
  }
  return pool;
}

void ValidateGameConfig(const GameConfig& c) {
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  if (c.iterations < 1 || c.grasps_per_iteration < 1 || c.init_random_grasps < 1) {
    throw std::invalid_argument("iteration counts must be positive");
  }
  if (c.max_epochs < 1 || c.batch_size < 1) {
    throw std::invalid_argument("max_epochs and batch_size must be positive");
  }
  if (!(c.importance_beta > 0.0) || !(c.learning_rate > 0.0)) {
    throw std::invalid_argument("beta and learning rate must be positive");
  }
}

// ----- Collection -----

std::vector<EpisodeRecord> Collect(const Environment& env, int n,
                                   const CollectOptions& options,
                                   std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("episode count must be >= 1");
  if (env.objects.empty()) throw std::invalid_argument("empty object pool");
  std::vector<EpisodeRecord> records(static_cast<std::size_t>(n));
  ParallelFor(n, [&](int k) {
    const std::uint64_t ep = DeriveSeed(seed, {kTagEpisode, static_cast<std::uint64_t>(k)});
    Rng rng(ep);
    const ObjectShape& object = env.objects[rng.Below(env.objects.size())];
    const Scene scene = PlaceObject(object, DeriveSeed(ep, {kTagScene}));
    const Image image = RenderScene(scene);
    const std::vector<Vec2> candidates =
        SampleCandidates(image, env.n_candidates, DeriveSeed(ep, {kTagCandidates}));

    GraspAction grasp;
    if (options.protagonist) {
      const ProbMatrix m = ProbabilityMatrix(*options.protagonist, image, candidates);
      grasp = SelectGrasp(m, options.grasp_mode, DeriveSeed(ep, {kTagGraspPick}));
    } else {
      Rng pick(DeriveSeed(ep, {kTagGraspPick}));
      const Vec2 c = candidates[pick.Below(candidates.size())];
      grasp = {c.x, c.y, static_cast<int>(pick.Below(kNumAngleBins))};
    }

    std::optional<AdversaryAction> adversary;
    if (options.adversary_kind) {
      const GraspOutcome outcome = GraspMargin(object, scene.pose, grasp, env.sim);
      if (outcome.success) {
        const std::uint64_t adv_seed = DeriveSeed(ep, {kTagAdversaryPick});
        if (options.adversary) {
          const Patch rotated = ExtractRotatedPatch(image, grasp.center(), grasp.angle());
          adversary = SelectAdversary(*options.adversary, rotated,
                                      NumActions(*options.adversary_kind),
                                      options.adversary_mode, adv_seed);
        } else {
          adversary = RandomAdversary(*options.adversary_kind, adv_seed);
        }
      }
    }
    EpisodeRecord record = RunEpisode(scene, image, grasp, adversary, env.sim);
    record.iteration = options.iteration;
    records[k] = std::move(record);
  });
  return records;
}

std::vector<EpisodeRecord> CollectRandomGrasps(const Environment& env, int n,
                                               std::uint64_t seed) {
  return Collect(env, n, CollectOptions{}, seed);
}

std::vector<EpisodeRecord> CollectWithAdversary(
    const Environment& env, const Network& protagonist, const Network* adversary,
    std::optional<AdversaryKind> kind, int n, const SelectionMode& grasp_mode,
    const SelectionMode& adversary_mode, std::uint64_t seed, int iteration) {
  CollectOptions options;
  options.protagonist = &protagonist;
  options.grasp_mode = grasp_mode;
  options.adversary_kind = kind;
  options.adversary = adversary;
  options.adversary_mode = adversary_mode;
  options.iteration = iteration;
  return Collect(env, n, options, seed);
}

// ----- Labels -----

std::vector<TrainingSample> MakeProtagonistTargets(
    std::span<const EpisodeRecord> records, const Network* adversary,
    double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  std::vector<TrainingSample> samples(records.size());
  ParallelFor(static_cast<int>(records.size()), [&](int i) {
    const EpisodeRecord& r = records[i];
    TrainingSample& s = samples[i];
    s.patch = r.grasp_patch;
    s.target_index = r.grasp.theta_bin;
    if (!r.grasp_success) {
      s.target_value = 0.0;
    } else if (adversary == nullptr) {
      s.target_value = 1.0;
    } else {
      if (!r.rotated_patch) {
        throw std::invalid_argument("successful record without rotated patch");
      }
      const std::vector<double> p = Forward(*adversary, *r.rotated_patch);
      s.target_value = 1.0 - alpha * *std::max_element(p.begin(), p.end());
    }
  });
  return samples;
}

std::vector<TrainingSample> MakeOutcomeProtagonistTargets(
    std::span<const EpisodeRecord> records, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  std::vector<TrainingSample> samples;
  samples.reserve(records.size());
  for (const EpisodeRecord& r : records) {
    TrainingSample s;
    s.patch = r.grasp_patch;
    s.target_index = r.grasp.theta_bin;
    if (r.grasp_success) {
      s.target_value = r.adversary_success.value_or(false) ? 1.0 - alpha : 1.0;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<TrainingSample> MakeAdversaryTargets(
    std::span<const EpisodeRecord> records, std::optional<AdversaryKind> kind) {
  std::vector<TrainingSample> samples;
  for (const EpisodeRecord& r : records) {
    if (!r.adversary_kind || !r.adversary_action || !r.adversary_success ||
        !r.rotated_patch) {
      continue;
    }
    if (kind && *r.adversary_kind != *kind) continue;
    TrainingSample s;
    s.patch = *r.rotated_patch;
    s.target_index = *r.adversary_action;
    s.target_value = *r.adversary_success ? 1.0 : 0.0;
    samples.push_back(std::move(s));
  }
  return samples;
}

// ----- Training -----

double BalancedAccuracy(std::span<const double> predictions,
                        std::span<const TrainingSample> samples) {
  int pos = 0, neg = 0, pos_hit = 0, neg_hit = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool truth = samples[i].target_value >= 0.5;
    const bool guess = predictions[i] >= 0.5;
    if (truth) {
      ++pos;
      pos_hit += guess;
    } else {
      ++neg;
      neg_hit += !guess;
    }
  }
  if (pos == 0 && neg == 0) return 0.0;
  if (pos == 0) return static_cast<double>(neg_hit) / neg;
  if (neg == 0) return static_cast<double>(pos_hit) / pos;
  return 0.5 * (static_cast<double>(pos_hit) / pos + static_cast<double>(neg_hit) / neg);
}

TrainStats TrainNetwork(Network& net, std::span<const TrainingSample> samples,
                        const GameConfig& config, std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("no training samples");
  OptState opt = InitOptState(net);
  opt.learning_rate = config.learning_rate;
  opt.decay = config.rms_decay;
  opt.epsilon = config.rms_epsilon;
  opt.batch_size = config.batch_size;

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<TrainingSample> batch;
  std::vector<double> predictions(samples.size());
  std::vector<double> batch_predictions;
  TrainStats stats;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    Rng rng(DeriveSeed(seed, {kTagShuffle, static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.Below(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      const Gradients g = BackwardFast(net, batch, &batch_predictions);
      for (std::size_t i = start; i < end; ++i) {
        predictions[order[i]] = batch_predictions[i - start];
      }
      loss_sum += g.loss * static_cast<double>(end - start);
      RmsPropStep(net, g, opt);
    }
    stats.epochs = epoch + 1;
    stats.loss = loss_sum / static_cast<double>(samples.size());
    stats.accuracy = BalancedAccuracy(predictions, samples);
    if (stats.accuracy >= config.accuracy_threshold) break;
  }
  return stats;
}

// ----- Schedules -----

namespace {

int CountSuccesses(std::span<const EpisodeRecord> records) {
  int n = 0;
  for (const EpisodeRecord& r : records) n += r.grasp_success;
  return n;
}

std::uint64_t PhaseTag(const std::optional<AdversaryKind>& kind) {
  if (!kind) return 0xba5e;
  return *kind == AdversaryKind::kShake ? 0x5ace : 0x5a7c;
}

}  // namespace

ArmState InitializeProtagonist(const Environment& env, const GameConfig& config,
                               std::uint64_t seed) {
  ValidateGameConfig(config);
  ArmState state;
  state.records = CollectRandomGrasps(env, config.init_random_grasps,
                                      DeriveSeed(seed, {kTagInitData}));
  const int successes = CountSuccesses(state.records);
  if (successes == 0) {
    throw RuntimeAbort("random grasp collection produced no successful grasp");
  }
  state.protagonist = InitNetwork(kNumAngleBins, DeriveSeed(seed, {kTagInitNet}));
  state.last_protagonist_targets =
      MakeProtagonistTargets(state.records, nullptr, config.alpha);
  IterationMetrics m;
  m.phase = "init";
  m.attempts = static_cast<int>(state.records.size());
  m.successes = successes;
  m.total_records = state.records.size();
  m.protagonist_samples = state.last_protagonist_targets.size();
  m.protagonist_train = TrainNetwork(state.protagonist, state.last_protagonist_targets,
                                     config, DeriveSeed(seed, {kTagInitTrain}));
  state.metrics.push_back(m);
  return state;
}

void BeginAdversaryPhase(ArmState& state, AdversaryKind kind) {
  state.adversary.reset();
  state.adversary_kind = kind;
  state.completed_iterations = 0;
  state.last_adversary_targets.clear();
}

void RunAdversarialIteration(ArmState& state, const Environment& env,
                             const GameConfig& config, std::uint64_t seed) {
  ValidateGameConfig(config);
  if (!state.adversary_kind) {
    throw std::logic_error("RunAdversarialIteration needs an adversary phase");
  }
  const AdversaryKind kind = *state.adversary_kind;
  const int iteration = state.completed_iterations;
  const std::uint64_t it_seed =
      DeriveSeed(seed, {PhaseTag(kind), static_cast<std::uint64_t>(iteration)});

  // Round 0 explores with a random adversary; later rounds act greedily.
  std::vector<EpisodeRecord> fresh = CollectWithAdversary(
      env, state.protagonist, state.adversary ? &*state.adversary : nullptr, kind,
      config.grasps_per_iteration, SelectionMode::Importance(config.importance_beta),
      SelectionMode::Greedy(), DeriveSeed(it_seed, {kTagCollect}), iteration);

  IterationMetrics m;
  m.phase = std::string(AdversaryKindName(kind));
  m.iteration = iteration;
  m.attempts = static_cast<int>(fresh.size());
  m.successes = CountSuccesses(fresh);
  for (const EpisodeRecord& r : fresh) {
    if (!r.adversary_success) continue;
    ++m.adversary_attempts;
    m.dislodged += *r.adversary_success;
  }
  if (m.successes == 0) {
    throw RuntimeAbort(m.phase + " iteration " + std::to_string(iteration) +
                       " collected no successful grasp");
  }
  state.records.insert(state.records.end(), std::make_move_iterator(fresh.begin()),
                       std::make_move_iterator(fresh.end()));

  // Adversary first, on everything collected so far.
  if (!state.adversary) {
    state.adversary = InitNetwork(NumActions(kind),
                                  DeriveSeed(seed, {PhaseTag(kind), kTagAdversaryNet}));
  }
  state.last_adversary_targets = MakeAdversaryTargets(state.records, kind);
  m.adversary_samples = state.last_adversary_targets.size();
  m.adversary_train = TrainNetwork(*state.adversary, state.last_adversary_targets,
                                   config, DeriveSeed(it_seed, {kTagTrainAdversary}));

  // Then the protagonist, against the updated adversary.
  state.last_protagonist_targets =
      config.outcome_based_labels
          ? MakeOutcomeProtagonistTargets(state.records, config.alpha)
          : MakeProtagonistTargets(state.records, &*state.adversary, config.alpha);
  m.protagonist_samples = state.last_protagonist_targets.size();
  m.protagonist_train =
      TrainNetwork(state.protagonist, state.last_protagonist_targets, config,
                   DeriveSeed(it_seed, {kTagTrainProtagonist}));
  m.total_records = state.records.size();
  state.metrics.push_back(m);
  state.completed_iterations = iteration + 1;
}

void RunBaselineIteration(ArmState& state, const Environment& env,
                          const GameConfig& config, int n, std::uint64_t seed) {
  ValidateGameConfig(config);
  const int iteration = state.completed_iterations;
  const std::uint64_t it_seed =
      DeriveSeed(seed, {PhaseTag(std::nullopt), static_cast<std::uint64_t>(iteration)});
  std::vector<EpisodeRecord> fresh = CollectWithAdversary(
      env, state.protagonist, nullptr, std::nullopt, n,
      SelectionMode::Importance(config.importance_beta), SelectionMode::Greedy(),
      DeriveSeed(it_seed, {kTagCollect}), iteration);
  IterationMetrics m;
  m.phase = "baseline";
  m.iteration = iteration;
  m.attempts = static_cast<int>(fresh.size());
  m.successes = CountSuccesses(fresh);
  if (m.successes == 0) {
    throw RuntimeAbort("baseline iteration " + std::to_string(iteration) +
                       " collected no successful grasp");
  }
  state.records.insert(state.records.end(), std::make_move_iterator(fresh.begin()),
                       std::make_move_iterator(fresh.end()));
  state.last_protagonist_targets =
      MakeProtagonistTargets(state.records, nullptr, config.alpha);
  m.protagonist_samples = state.last_protagonist_targets.size();
  m.protagonist_train =
      TrainNetwork(state.protagonist, state.last_protagonist_targets, config,
                   DeriveSeed(it_seed, {kTagTrainProtagonist}));
  m.total_records = state.records.size();
  state.metrics.push_back(m);
  state.completed_iterations = iteration + 1;
}

JointResult JointTrain(const Environment& env, const GameConfig& config,
                       AdversaryKind kind, std::uint64_t seed,
                       const ArmState* start) {
  ValidateGameConfig(config);
  JointResult result;
  ArmState state = start ? *start : InitializeProtagonist(env, config, seed);
  BeginAdversaryPhase(state, kind);
  for (int i = 0; i < config.iterations; ++i) {
    RunAdversarialIteration(state, env, config, seed);
    result.protagonists.push_back(state.protagonist);
    result.adversaries.push_back(*state.adversary);
    result.metrics.push_back(state.metrics.back());
    result.protagonist_targets.push_back(state.last_protagonist_targets);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace advgrasp
