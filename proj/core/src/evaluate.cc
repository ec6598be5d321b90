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

#include "advgrasp/evaluate.h"

#include <stdexcept>

#include "advgrasp/parallel.h"
#include "advgrasp/policy.h"
#include "advgrasp/rng.h"

namespace advgrasp {

namespace {
constexpr std::uint64_t kTagEvalPose = 0xe7a1;
constexpr std::uint64_t kTagEvalCandidates = 0xe7a2;
}  // namespace

int EvalColumn::successes() const {
  int n = 0;
  for (const ObjectTally& o : objects) n += o.successes;
  return n;
}

int EvalColumn::grasp_successes() const {
  int n = 0;
  for (const ObjectTally& o : objects) n += o.grasp_successes;
  return n;
}

int EvalColumn::tries() const {
  int n = 0;
  for (const ObjectTally& o : objects) n += o.tries;
  return n;
}

double EvalColumn::overall() const {
  const int t = tries();
  return t ? static_cast<double>(successes()) / t : 0.0;
}

SimConfig RegimeSim(const SimConfig& base, const RegimeSpec& regime) {
  SimConfig sim = base;
  sim.grip_force = regime.grip_force;
  sim.friction_scale = regime.friction_scale;
  return sim;
}

bool LiftHolds(const GraspOutcome& outcome, const ObjectShape& object,
               const SimConfig& config) {
  if (!outcome.success) return false;
  const double hold =
      2.0 * EffectiveFriction(object, config) * config.grip_force * outcome.margin;
  return hold >= object.mass * kGravity;
}

std::vector<EvalColumn> EvaluateAll(std::span<const Network> protagonists,
                                    std::span<const ObjectShape> objects,
                                    const RegimeSpec& regime,
                                    const SimConfig& base, int tries,
                                    std::uint64_t seed) {
  if (tries < 1) throw std::invalid_argument("tries must be >= 1");
  for (const Network& net : protagonists) {
    if (net.n_outputs() != kNumAngleBins) {
      throw std::invalid_argument("protagonist must have one output per angle bin");
    }
  }
  const SimConfig sim = RegimeSim(base, regime);
  const std::size_t n_nets = protagonists.size();
  const int n = static_cast<int>(objects.size()) * tries;
  // [trial][net]
  std::vector<char> grasped(n * n_nets), lifted(n * n_nets);
  ParallelFor(n, [&](int k) {
    const auto i = static_cast<std::uint64_t>(k / tries);
    const auto t = static_cast<std::uint64_t>(k % tries);
    const ObjectShape& object = objects[i];
    const Scene scene = PlaceObject(object, DeriveSeed(seed, {kTagEvalPose, i, t}));
    const Image image = RenderScene(scene);
    const std::vector<Vec2> candidates = SampleCandidates(
        image, regime.n_candidates, DeriveSeed(seed, {kTagEvalCandidates, i, t}));
    const std::vector<Patch> patches = CandidatePatches(image, candidates);
    for (std::size_t j = 0; j < n_nets; ++j) {
      const ProbMatrix m = ProbabilityMatrix(protagonists[j], patches);
      const GraspAction grasp = SelectGrasp(m, SelectionMode::Greedy(), 0);
      const GraspOutcome outcome = GraspMargin(object, scene.pose, grasp, sim);
      grasped[k * n_nets + j] = outcome.success;
      lifted[k * n_nets + j] = LiftHolds(outcome, object, sim);
    }
  });
  std::vector<EvalColumn> columns(n_nets);
  for (std::size_t j = 0; j < n_nets; ++j) {
    EvalColumn& column = columns[j];
    column.regime = regime.name;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      ObjectTally tally;
      tally.object_seed = objects[i].seed;
      tally.difficulty = objects[i].difficulty;
      tally.tries = tries;
      for (int t = 0; t < tries; ++t) {
        const std::size_t k = i * tries + t;
        tally.grasp_successes += grasped[k * n_nets + j];
        tally.successes += lifted[k * n_nets + j];
      }
      column.objects.push_back(tally);
    }
  }
  return columns;
}

EvalColumn Evaluate(const Network& protagonist,
                    std::span<const ObjectShape> objects,
                    const RegimeSpec& regime, const SimConfig& base, int tries,
                    std::uint64_t seed) {
  return EvaluateAll(std::span(&protagonist, 1), objects, regime, base, tries, seed)
      .front();
}

}  // namespace advgrasp
