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

#include "advgrasp/policy.h"

#include <algorithm>
#include <cmath>

#include "advgrasp/parallel.h"
#include "advgrasp/rng.h"

namespace advgrasp {

std::vector<Vec2> SampleCandidates(const Image& image, int n,
                                   std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("candidate count must be >= 1");
  std::vector<int> mask;
  for (int i = 0; i < kImageSize * kImageSize; ++i) {
    if (image.pixels[i] > 0.0f) mask.push_back(i);
  }
  Rng rng(DeriveSeed(seed, {0xca4d}));
  std::vector<Vec2> out;
  out.reserve(n);
  const double dx = image.meters_per_pixel;
  for (int k = 0; k < n; ++k) {
    if (mask.empty()) {
      out.push_back({rng.Uniform(0.0, kWorkspaceSize),
                     rng.Uniform(0.0, kWorkspaceSize)});
      continue;
    }
    const int pixel = mask[rng.Below(mask.size())];
    const int row = pixel / kImageSize, col = pixel % kImageSize;
    out.push_back({(col + 0.5) * dx, (row + 0.5) * dx});
  }
  return out;
}

std::vector<Patch> CandidatePatches(const Image& image,
                                    std::span<const Vec2> candidates) {
  std::vector<Patch> patches(candidates.size());
  ParallelFor(static_cast<int>(candidates.size()), [&](int g) {
    patches[g] = ExtractRotatedPatch(image, candidates[g], 0.0);
  });
  return patches;
}

ProbMatrix ProbabilityMatrix(const Network& net, std::span<const Patch> patches) {
  if (patches.empty()) throw std::invalid_argument("no candidates");
  ProbMatrix m;
  m.rows = static_cast<int>(patches.size());
  m.cols = net.n_outputs();
  for (const Patch& p : patches) m.candidates.push_back(p.source_center);
  m.entries.resize(static_cast<std::size_t>(m.rows) * m.cols);
  ParallelFor(m.rows, [&](int g) {
    const std::vector<double> probs = Forward(net, patches[g]);
    std::copy(probs.begin(), probs.end(),
              m.entries.begin() + static_cast<std::ptrdiff_t>(g) * m.cols);
  });
  return m;
}

ProbMatrix ProbabilityMatrix(const Network& net, const Image& image,
                             std::span<const Vec2> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  return ProbabilityMatrix(net, CandidatePatches(image, candidates));
}

int SelectIndex(std::span<const double> scores, const SelectionMode& mode,
                std::uint64_t seed) {
  if (scores.empty()) throw std::invalid_argument("nothing to select from");
  const int n = static_cast<int>(scores.size());
  switch (mode.kind) {
    case SelectionMode::Kind::kGreedy: {
      int best = 0;
      for (int i = 1; i < n; ++i) {
        if (scores[i] > scores[best]) best = i;
      }
      return best;
    }
    case SelectionMode::Kind::kUniform: {
      Rng rng(DeriveSeed(seed, {0x51}));
      return static_cast<int>(rng.Below(static_cast<std::uint64_t>(n)));
    }
    case SelectionMode::Kind::kImportance: {
      if (!(mode.beta > 0.0)) throw std::invalid_argument("beta must be positive");
      // score^beta, normalised by the maximum in log space.
      const double top = std::log(*std::max_element(scores.begin(), scores.end()));
      std::vector<double> cumulative(scores.size());
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        total += std::exp(mode.beta * (std::log(scores[i]) - top));
        cumulative[i] = total;
      }
      Rng rng(DeriveSeed(seed, {0x1a}));
      const double u = rng.Uniform() * total;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      return std::min(n - 1, static_cast<int>(it - cumulative.begin()));
    }
  }
  return 0;
}

GraspAction SelectGrasp(const ProbMatrix& matrix, const SelectionMode& mode,
                        std::uint64_t seed) {
  if (matrix.rows < 1 || matrix.cols != kNumAngleBins ||
      matrix.candidates.size() != static_cast<std::size_t>(matrix.rows)) {
    throw std::invalid_argument("malformed probability matrix");
  }
  const int cell = SelectIndex(matrix.entries, mode, seed);
  const Vec2 c = matrix.candidates[cell / matrix.cols];
  return {c.x, c.y, cell % matrix.cols};
}

AdversaryAction SelectAdversary(const Network& net, const Patch& rotated_patch,
                                int n_actions, const SelectionMode& mode,
                                std::uint64_t seed) {
  if (n_actions != kNumShakeActions && n_actions != kNumSnatchActions) {
    throw std::invalid_argument("adversary needs 15 or 36 actions");
  }
  if (net.n_outputs() != n_actions) {
    throw std::invalid_argument("adversary network width mismatch");
  }
  const std::vector<double> probs = Forward(net, rotated_patch);
  const AdversaryKind kind =
      n_actions == kNumShakeActions ? AdversaryKind::kShake : AdversaryKind::kSnatch;
  return {kind, SelectIndex(probs, mode, seed)};
}

AdversaryAction RandomAdversary(AdversaryKind kind, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, {0xad}));
  return {kind, static_cast<int>(rng.Below(static_cast<std::uint64_t>(NumActions(kind))))};
}

}  // namespace advgrasp
