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

#ifndef ADVGRASP_EPISODE_H_
#define ADVGRASP_EPISODE_H_

#include <cstdint>
#include <optional>

#include "advgrasp/grasp_sim.h"
#include "advgrasp/scene.h"

namespace advgrasp {

// One grasp attempt and, when the grasp held, one adversary attempt.
// Invariants: adversary fields are set only on successful grasps, and the
// rotated patch exists exactly when the grasp succeeded.
struct EpisodeRecord {
  std::uint64_t scene_seed = 0;
  std::uint64_t object_seed = 0;
  Difficulty difficulty = Difficulty::kEasy;
  GraspAction grasp;
  Patch grasp_patch;
  std::optional<Patch> rotated_patch;
  bool grasp_success = false;
  double grasp_margin = 0.0;
  std::optional<AdversaryKind> adversary_kind;
  std::optional<int> adversary_action;
  std::optional<bool> adversary_success;
  int iteration = 0;
  std::uint64_t config_id = 0;
};

// Stable fingerprint of every simulator constant.
std::uint64_t ConfigFingerprint(const SimConfig& config);

// Executes the grasp and, if it succeeded and an adversary is given, the
// matching perturbation. `image` must be RenderScene(scene).
EpisodeRecord RunEpisode(const Scene& scene, const Image& image,
                         const GraspAction& grasp,
                         const std::optional<AdversaryAction>& adversary,
                         const SimConfig& config);
EpisodeRecord RunEpisode(const Scene& scene, const GraspAction& grasp,
                         const std::optional<AdversaryAction>& adversary,
                         const SimConfig& config);

}  // namespace advgrasp

#endif  // ADVGRASP_EPISODE_H_
