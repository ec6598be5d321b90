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

#ifndef ADVGRASP_CONFIG_H_
#define ADVGRASP_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "advgrasp/game_trainer.h"
#include "advgrasp/grasp_sim.h"

namespace advgrasp {

// Evaluation conditions: grip force, number of sampled grasp centres and
// the friction multiplier of the gripper pads.
struct RegimeSpec {
  std::string name;
  double grip_force = 7.0;
  int n_candidates = 128;
  double friction_scale = 1.0;
};

RegimeSpec LowRegime();
RegimeSpec HighRegime();

struct ObjectSetSpec {
  ObjectCounts train{40, 40, 20};
  std::uint64_t train_seed = 1001;
  ObjectCounts eval{4, 4, 2};
  std::uint64_t eval_seed = 2002;
};

struct ProbeSpec {
  int adversary_probe_grasps = 200;
  int robustness_probe_scenes = 400;
};

inline constexpr const char* kArmBaseline = "baseline";
inline constexpr const char* kArmShake = "shake";
inline constexpr const char* kArmShakeSnatch = "shake_snatch";

struct ExperimentConfig {
  std::string name = "desk";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  ObjectSetSpec objects;
  std::vector<RegimeSpec> eval_regimes{LowRegime(), HighRegime()};
  int tries_per_object = 10;
  std::vector<std::string> arms{kArmBaseline, kArmShake, kArmShakeSnatch};
  double baseline_budget_multiplier = 1.3;
  GameConfig game;
  int snatch_iterations = 2;
  int snatch_grasps_per_iteration = 400;
  int train_candidates = 128;
  SimConfig sim;
  ProbeSpec probes;

  bool HasArm(const std::string& arm) const;
  // Grasp attempts of the shake arm and of the baseline arm.
  int AdversarialBudget() const;
  int BaselineBudget() const;
};

// Throws ConfigError naming the dotted key of the first problem. Missing
// keys take their defaults; unknown keys are rejected.
ExperimentConfig ParseExperimentConfig(const std::string& text);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
void ValidateExperimentConfig(const ExperimentConfig& config);
// Canonical JSON with every key; parses back to an equal config.
std::string ExperimentConfigToJson(const ExperimentConfig& config);

}  // namespace advgrasp

#endif  // ADVGRASP_CONFIG_H_
