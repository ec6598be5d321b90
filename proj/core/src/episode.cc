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

#include "advgrasp/episode.h"

#include <bit>

#include "advgrasp/rng.h"

namespace advgrasp {

std::uint64_t ConfigFingerprint(const SimConfig& config) {
  std::uint64_t h = 0x5eed;
  for (double v : {config.grip_force, config.max_payload, config.max_width,
                   config.shake_freq, config.shake_amp, config.lever_gain,
                   config.pull_force, config.clearance, config.friction_scale}) {
    h = Mix64(h ^ std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

EpisodeRecord RunEpisode(const Scene& scene, const Image& image,
                         const GraspAction& grasp,
                         const std::optional<AdversaryAction>& adversary,
                         const SimConfig& config) {
  EpisodeRecord record;
  record.scene_seed = scene.seed;
  record.grasp = grasp;
  record.config_id = ConfigFingerprint(config);
  record.grasp_patch = ExtractRotatedPatch(image, grasp.center(), 0.0);
  if (!scene.object) return record;

  const ObjectShape& object = *scene.object;
  record.object_seed = object.seed;
  record.difficulty = object.difficulty;
  const GraspOutcome outcome = GraspMargin(object, scene.pose, grasp, config);
  record.grasp_success = outcome.success;
  record.grasp_margin = outcome.margin;
  if (!outcome.success) return record;

  record.rotated_patch =
      ExtractRotatedPatch(image, grasp.center(), grasp.angle());
  if (!adversary) return record;
  record.adversary_kind = adversary->kind;
  record.adversary_action = adversary->index;
  record.adversary_success =
      adversary->kind == AdversaryKind::kShake
          ? ApplyShake(outcome, grasp, object, config, *adversary)
          : ApplySnatch(outcome, grasp, object, scene.pose, config, *adversary);
  return record;
}

EpisodeRecord RunEpisode(const Scene& scene, const GraspAction& grasp,
                         const std::optional<AdversaryAction>& adversary,
                         const SimConfig& config) {
  return RunEpisode(scene, RenderScene(scene), grasp, adversary, config);
}

}  // namespace advgrasp
