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

#ifndef ADVGRASP_POLICY_H_
#define ADVGRASP_POLICY_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "advgrasp/grasp_sim.h"
#include "advgrasp/neural.h"
#include "advgrasp/scene.h"

namespace advgrasp {

// N_g x N_a success probabilities, row g for candidate g.
struct ProbMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;  // row-major
  std::vector<Vec2> candidates;

  double at(int row, int col) const {
    return entries[static_cast<std::size_t>(row) * cols + col];
  }
};

struct SelectionMode {
  enum class Kind { kGreedy, kImportance, kUniform };
  Kind kind = Kind::kGreedy;
  double beta = 1.0;  // importance temperature, > 0

  static SelectionMode Greedy() { return {Kind::kGreedy, 1.0}; }
  static SelectionMode Importance(double beta = 1.0) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    return {Kind::kImportance, beta};
  }
  static SelectionMode Uniform() { return {Kind::kUniform, 1.0}; }
};

// `n` grasp centres drawn uniformly (with replacement) from object-mask
// pixel centres; uniform over the workspace when the mask is empty.
std::vector<Vec2> SampleCandidates(const Image& image, int n, std::uint64_t seed);

// Row g holds Forward(net, unrotated patch at candidate g).
ProbMatrix ProbabilityMatrix(const Network& net, const Image& image,
                             std::span<const Vec2> candidates);

// Unrotated candidate patches, reusable across networks.
std::vector<Patch> CandidatePatches(const Image& image,
                                    std::span<const Vec2> candidates);
ProbMatrix ProbabilityMatrix(const Network& net, std::span<const Patch> patches);

// Index selection shared by both players. Greedy takes the first maximum;
// importance draws with probability proportional to score^beta; uniform
// ignores the scores.
int SelectIndex(std::span<const double> scores, const SelectionMode& mode,
                std::uint64_t seed);

GraspAction SelectGrasp(const ProbMatrix& matrix, const SelectionMode& mode,
                        std::uint64_t seed);

AdversaryAction SelectAdversary(const Network& net, const Patch& rotated_patch,
                                int n_actions, const SelectionMode& mode,
                                std::uint64_t seed);
// Uniformly random action, no network involved.
AdversaryAction RandomAdversary(AdversaryKind kind, std::uint64_t seed);

}  // namespace advgrasp

#endif  // ADVGRASP_POLICY_H_
