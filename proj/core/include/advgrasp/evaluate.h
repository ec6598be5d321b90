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

#ifndef ADVGRASP_EVALUATE_H_
#define ADVGRASP_EVALUATE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "advgrasp/config.h"
#include "advgrasp/grasp_sim.h"
#include "advgrasp/neural.h"
#include "advgrasp/scene.h"

namespace advgrasp {

struct ObjectTally {
  std::uint64_t object_seed = 0;
  Difficulty difficulty = Difficulty::kEasy;
  int successes = 0;        // grasped and lifted
  int grasp_successes = 0;  // grasped, lift not checked
  int tries = 0;
};

// One results-table column: a protagonist evaluated on the held-out set.
struct EvalColumn {
  std::string regime;
  std::vector<ObjectTally> objects;

  int successes() const;
  int grasp_successes() const;
  int tries() const;
  double overall() const;  // successes / tries
};

SimConfig RegimeSim(const SimConfig& base, const RegimeSpec& regime);

// The hold force 2 mu F margin carries the object's weight.
bool LiftHolds(const GraspOutcome& outcome, const ObjectShape& object,
               const SimConfig& config);

// Greedy grasps on `tries` re-randomised poses per object. The pose and the
// candidate stream of try t on object i depend only on (seed, i, t), so
// every protagonist sees the same trials and a regime with more candidates
// sees a superset of the centres of one with fewer.
EvalColumn Evaluate(const Network& protagonist,
                    std::span<const ObjectShape> objects,
                    const RegimeSpec& regime, const SimConfig& base, int tries,
                    std::uint64_t seed);

// Same trials for several protagonists; identical to calling Evaluate on
// each, with rendering and patch extraction shared.
std::vector<EvalColumn> EvaluateAll(std::span<const Network> protagonists,
                                    std::span<const ObjectShape> objects,
                                    const RegimeSpec& regime,
                                    const SimConfig& base, int tries,
                                    std::uint64_t seed);

}  // namespace advgrasp

#endif  // ADVGRASP_EVALUATE_H_
