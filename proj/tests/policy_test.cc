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

#include <cmath>
#include <vector>

#include "advgrasp/rng.h"
#include "gtest/gtest.h"

namespace advgrasp {
namespace {

ProbMatrix RandomMatrix(Rng& rng, int rows, bool coarse) {
  ProbMatrix m;
  m.rows = rows;
  m.cols = kNumAngleBins;
  for (int g = 0; g < rows; ++g) m.candidates.push_back({0.01 * g, 0.02 * g});
  for (int i = 0; i < rows * m.cols; ++i) {
    // Coarse values make ties common so the tie rule is exercised.
    m.entries.push_back(coarse ? rng.Below(5) / 5.0 + 0.1 : rng.Uniform(0.01, 0.99));
  }
  return m;
}

// Single dense network whose outputs do not depend on the patch.
Network ConstantNetwork(const std::vector<double>& probabilities) {
  const int n = static_cast<int>(probabilities.size());
  std::vector<float> bias;
  for (double p : probabilities) bias.push_back(static_cast<float>(std::log(p / (1 - p))));
  return Network(Architecture::SingleDense(n), 0,
                 {Tensor{"w", {n, kPatchSize * kPatchSize},
                         std::vector<float>(static_cast<std::size_t>(n) * kPatchSize * kPatchSize)},
                  Tensor{"b", {n}, bias}});
}

TEST(PolicyTest, GreedyEqualsExhaustiveScan) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProbMatrix m = RandomMatrix(rng, 1 + static_cast<int>(rng.Below(20)), trial % 2);
    int best_g = 0, best_a = 0;
    for (int g = 0; g < m.rows; ++g) {
      for (int a = 0; a < m.cols; ++a) {
        if (m.at(g, a) > m.at(best_g, best_a)) best_g = g, best_a = a;
      }
    }
    const GraspAction grasp = SelectGrasp(m, SelectionMode::Greedy(), trial);
    ASSERT_EQ(grasp.theta_bin, best_a);
    ASSERT_EQ(grasp.x, m.candidates[best_g].x);
    ASSERT_EQ(grasp.y, m.candidates[best_g].y);
  }
}

TEST(PolicyTest, UniqueMaxAndTieRule) {
  ProbMatrix m;
  m.rows = 5;
  m.cols = kNumAngleBins;
  for (int g = 0; g < 5; ++g) m.candidates.push_back({0.1 + g * 0.01, 0.2});
  m.entries.assign(5 * kNumAngleBins, 0.4);
  GraspAction tie = SelectGrasp(m, SelectionMode::Greedy(), 0);
  EXPECT_EQ(tie.x, m.candidates[0].x);
  EXPECT_EQ(tie.theta_bin, 0);
  m.entries[3 * kNumAngleBins + 7] = 0.9;
  const GraspAction g = SelectGrasp(m, SelectionMode::Greedy(), 0);
  EXPECT_EQ(g.x, m.candidates[3].x);
  EXPECT_EQ(g.theta_bin, 7);
}

TEST(PolicyTest, SharpImportanceSamplingFollowsArgmax) {
  Rng rng(2);
  int hits = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    std::vector<double> scores(kNumAngleBins);
    for (double& s : scores) s = rng.Uniform(0.05, 0.75);
    const int best = static_cast<int>(rng.Below(scores.size()));
    scores[best] = 0.85 + 0.1 * rng.Uniform();
    hits += SelectIndex(scores, SelectionMode::Importance(100.0), draw) == best;
  }
  EXPECT_GE(hits, 990);
}

TEST(PolicyTest, ImportanceFrequenciesFollowScores) {
  const std::vector<double> scores = {0.1, 0.2, 0.3, 0.4};
  std::vector<int> counts(4, 0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[SelectIndex(scores, SelectionMode::Importance(1.0), i)];
  for (int k = 0; k < 4; ++k) {
    const double p = scores[k];
    EXPECT_NEAR(counts[k] / static_cast<double>(n), p, 5 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(PolicyTest, UniformAdversaryFrequencies) {
  const Network net = ConstantNetwork(std::vector<double>(15, 0.3));
  Patch patch;
  std::vector<int> counts(15, 0);
  const int n = 15000;
  for (int i = 0; i < n; ++i) {
    ++counts[SelectAdversary(net, patch, 15, SelectionMode::Uniform(), i).index];
  }
  const double p = 1.0 / 15, sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, n * p, 5 * sigma);
}

TEST(PolicyTest, GreedyAdversary) {
  std::vector<double> probs(15, 0.2);
  probs[11] = 0.7;
  Patch patch;
  EXPECT_EQ(SelectAdversary(ConstantNetwork(probs), patch, 15, SelectionMode::Greedy(), 0).index,
            11);
  Network zero = InitNetwork(36, 1);
  ZeroNetwork(zero);
  const AdversaryAction a = SelectAdversary(zero, patch, 36, SelectionMode::Greedy(), 0);
  EXPECT_EQ(a.index, 0);
  EXPECT_EQ(a.kind, AdversaryKind::kSnatch);
}

TEST(PolicyTest, SelectionIsReproducible) {
  const std::vector<double> scores = {0.3, 0.1, 0.9, 0.5};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(SelectIndex(scores, SelectionMode::Importance(), seed),
              SelectIndex(scores, SelectionMode::Importance(), seed));
  }
  EXPECT_THROW(SelectionMode::Importance(0.0), std::invalid_argument);
}

TEST(PolicyTest, CandidatesLieOnTheObjectMask) {
  const Image image = RenderScene(PlaceObject(GenerateObject(4, Difficulty::kMedium), 9));
  for (int n : {128, 1280}) {
    const std::vector<Vec2> c = SampleCandidates(image, n, 3);
    ASSERT_EQ(static_cast<int>(c.size()), n);
    for (const Vec2& p : c) {
      const int col = static_cast<int>(p.x / kMetersPerPixel);
      const int row = static_cast<int>(p.y / kMetersPerPixel);
      EXPECT_GT(image.at(row, col), 0.0f);
    }
    EXPECT_EQ(c, SampleCandidates(image, n, 3));
  }
  EXPECT_THROW(SampleCandidates(image, 0, 1), std::invalid_argument);
}

TEST(PolicyTest, EmptySceneCandidatesCoverWorkspace) {
  const Image image = RenderScene(EmptyScene());
  const std::vector<Vec2> c = SampleCandidates(image, 4000, 8);
  int left = 0;
  for (const Vec2& p : c) {
    EXPECT_GE(p.x, 0.0);
    EXPECT_LT(p.x, kWorkspaceSize);
    EXPECT_GE(p.y, 0.0);
    EXPECT_LT(p.y, kWorkspaceSize);
    left += p.x < kWorkspaceSize / 2;
  }
  EXPECT_NEAR(left, 2000, 5 * std::sqrt(1000.0));
}

TEST(PolicyTest, ProbabilityMatrixRowsMatchForward) {
  const Image image = RenderScene(PlaceObject(GenerateObject(2, Difficulty::kEasy), 3));
  const Network net = InitNetwork(18, 8);
  const std::vector<Vec2> candidates = SampleCandidates(image, 12, 4);
  const ProbMatrix m = ProbabilityMatrix(net, image, candidates);
  ASSERT_EQ(m.rows, 12);
  ASSERT_EQ(m.cols, 18);
  for (int g = 0; g < m.rows; ++g) {
    const std::vector<double> row =
        Forward(net, ExtractRotatedPatch(image, candidates[g], 0.0));
    for (int a = 0; a < m.cols; ++a) {
      EXPECT_EQ(m.at(g, a), row[a]);
      EXPECT_GT(m.at(g, a), 0.0);
      EXPECT_LT(m.at(g, a), 1.0);
    }
  }
  Network zero = net;
  ZeroNetwork(zero);
  const ProbMatrix single = ProbabilityMatrix(zero, image, std::span(candidates).first(1));
  EXPECT_EQ(single.rows, 1);
  for (double p : single.entries) EXPECT_EQ(p, 0.5);
}

}  // namespace
}  // namespace advgrasp
