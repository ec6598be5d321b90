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

#ifndef ADVGRASP_GAME_TRAINER_H_
#define ADVGRASP_GAME_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advgrasp/episode.h"
#include "advgrasp/grasp_sim.h"
#include "advgrasp/neural.h"
#include "advgrasp/policy.h"
#include "advgrasp/scene.h"

namespace advgrasp {

// Training world: the simulator constants and the object pool episodes draw
// from. Every episode re-places a pool object at a fresh random pose.
struct Environment {
  SimConfig sim;
  std::vector<ObjectShape> objects;
  int n_candidates = 128;
};

struct ObjectCounts {
  int easy = 0;
  int medium = 0;
  int hard = 0;

  int total() const { return easy + medium + hard; }
};

// Pool of `counts` objects with seeds derived from `seed`.
std::vector<ObjectShape> MakeObjectPool(const ObjectCounts& counts,
                                        std::uint64_t seed);

struct GameConfig {
  double alpha = 0.5;
  int iterations = 3;
  int grasps_per_iteration = 600;
  int init_random_grasps = 2000;
  int max_epochs = 50;
  double accuracy_threshold = 0.75;
  double importance_beta = 1.0;
  // Label successful grasps from the realised adversary outcome instead of
  // the adversary's predicted maximum. Off by default.
  bool outcome_based_labels = false;
  double learning_rate = 1e-3;
  double rms_decay = 0.9;
  double rms_epsilon = 1e-8;
  int batch_size = 64;
};

void ValidateGameConfig(const GameConfig& config);

struct TrainStats {
  int epochs = 0;
  double accuracy = 0.0;  // balanced accuracy of the final epoch
  double loss = 0.0;      // mean masked BCE of the final epoch
};

struct CollectOptions {
  const Network* protagonist = nullptr;  // null: uniform random grasps
  SelectionMode grasp_mode = SelectionMode::Importance();
  std::optional<AdversaryKind> adversary_kind;  // none: no adversary
  const Network* adversary = nullptr;  // null with a kind: random adversary
  SelectionMode adversary_mode = SelectionMode::Greedy();
  int iteration = 0;
};

// Runs `n` independent episodes; episode k depends only on (seed, k).
std::vector<EpisodeRecord> Collect(const Environment& env, int n,
                                   const CollectOptions& options,
                                   std::uint64_t seed);

std::vector<EpisodeRecord> CollectRandomGrasps(const Environment& env, int n,
                                               std::uint64_t seed);

std::vector<EpisodeRecord> CollectWithAdversary(
    const Environment& env, const Network& protagonist, const Network* adversary,
    std::optional<AdversaryKind> kind, int n, const SelectionMode& grasp_mode,
    const SelectionMode& adversary_mode, std::uint64_t seed, int iteration = 0);

// Failed grasp -> 0. Successful grasp -> 1 without an adversary, else
// 1 - alpha * max_u adversary(rotated patch).
std::vector<TrainingSample> MakeProtagonistTargets(
    std::span<const EpisodeRecord> records, const Network* adversary,
    double alpha);

// Failed grasp -> 0; success -> 1 - alpha if an adversary dislodged it,
// else 1.
std::vector<TrainingSample> MakeOutcomeProtagonistTargets(
    std::span<const EpisodeRecord> records, double alpha);

// Records carrying an adversary attempt (optionally of one kind) become
// (rotated patch, action, dislodged ? 1 : 0).
std::vector<TrainingSample> MakeAdversaryTargets(
    std::span<const EpisodeRecord> records,
    std::optional<AdversaryKind> kind = std::nullopt);

// Shuffled mini-batch RMSProp on masked BCE until the epoch's balanced
// accuracy reaches the threshold or max_epochs. The optimizer cache starts
// from zero on every call.
TrainStats TrainNetwork(Network& net, std::span<const TrainingSample> samples,
                        const GameConfig& config, std::uint64_t seed);

// Balanced accuracy of thresholded predictions against binarised targets.
double BalancedAccuracy(std::span<const double> predictions,
                        std::span<const TrainingSample> samples);

struct IterationMetrics {
  std::string phase;  // init, baseline, shake, snatch
  int iteration = 0;
  int attempts = 0;
  int successes = 0;
  int adversary_attempts = 0;
  int dislodged = 0;
  std::size_t total_records = 0;
  std::size_t protagonist_samples = 0;
  std::size_t adversary_samples = 0;
  TrainStats protagonist_train;
  TrainStats adversary_train;

  double grasp_success_rate() const {
    return attempts ? static_cast<double>(successes) / attempts : 0.0;
  }
  double dislodge_rate() const {
    return adversary_attempts
               ? static_cast<double>(dislodged) / adversary_attempts
               : 0.0;
  }
};

// State of one training arm between iterations.
struct ArmState {
  Network protagonist;
  std::optional<Network> adversary;
  std::optional<AdversaryKind> adversary_kind;
  std::vector<EpisodeRecord> records;  // aggregated over every iteration
  std::vector<IterationMetrics> metrics;
  int completed_iterations = 0;  // within the current phase
  // Targets emitted by the most recent training round, in record order.
  std::vector<TrainingSample> last_protagonist_targets;
  std::vector<TrainingSample> last_adversary_targets;
};

// Collects random grasps and trains the first protagonist on 0/1 labels.
ArmState InitializeProtagonist(const Environment& env, const GameConfig& config,
                               std::uint64_t seed);

// Switches an arm to a new adversary phase (fresh adversary network, phase
// iteration counter reset); keeps the protagonist and the aggregated data.
void BeginAdversaryPhase(ArmState& state, AdversaryKind kind);

// One collect -> train adversary -> train protagonist round. The first
// round of a phase uses a uniformly random adversary. Throws RuntimeAbort
// when the round collects no successful grasp.
void RunAdversarialIteration(ArmState& state, const Environment& env,
                             const GameConfig& config, std::uint64_t seed);

// Collects `n` protagonist grasps with no adversary and retrains on 0/1
// labels over the aggregated data.
void RunBaselineIteration(ArmState& state, const Environment& env,
                          const GameConfig& config, int n, std::uint64_t seed);

struct JointResult {
  std::vector<Network> protagonists;  // after each iteration
  std::vector<Network> adversaries;   // after each iteration
  std::vector<IterationMetrics> metrics;
  std::vector<std::vector<TrainingSample>> protagonist_targets;  // per iteration
  ArmState final_state;
};

// Full adversarial schedule. Starts from `start` when given (used to seed a
// snatch phase from a shake-trained protagonist), otherwise from
// InitializeProtagonist.
JointResult JointTrain(const Environment& env, const GameConfig& config,
                       AdversaryKind kind, std::uint64_t seed,
                       const ArmState* start = nullptr);

}  // namespace advgrasp

#endif  // ADVGRASP_GAME_TRAINER_H_
