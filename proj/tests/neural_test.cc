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

#include "advgrasp/neural.h"

#include <cmath>
#include <vector>

#include "advgrasp/rng.h"
#include "gtest/gtest.h"

namespace advgrasp {
namespace {

Patch RandomPatch(Rng& rng) {
  Patch p;
  for (float& v : p.pixels) v = static_cast<float>(rng.Uniform());
  return p;
}

std::vector<TrainingSample> RandomBatch(Rng& rng, int n, int outputs) {
  std::vector<TrainingSample> batch(n);
  for (TrainingSample& s : batch) {
    s.patch = RandomPatch(rng);
    s.target_index = static_cast<int>(rng.Below(outputs));
    s.target_value = rng.Uniform() < 0.3 ? rng.Uniform() : static_cast<double>(rng.Below(2));
  }
  return batch;
}

TEST(NeuralTest, BceValues) {
  EXPECT_NEAR(BceLoss(0.5, 1.0), std::log(2.0), 1e-12);
  EXPECT_NEAR(BceLoss(0.5, 1.0), 0.693147, 1e-6);
  EXPECT_NEAR(BceLoss(0.6, 0.6), 0.673012, 1e-6);
  EXPECT_GT(BceLoss(0.5, 0.6), BceLoss(0.6, 0.6));
  EXPECT_LT(BceLoss(1.0 - 1e-12, 1.0), 1e-11);
  EXPECT_NEAR(BceFromLogit(0.0, 1.0), std::log(2.0), 1e-12);
  EXPECT_NEAR(BceFromLogit(std::log(1.5), 0.6), 0.673012, 1e-6);
  EXPECT_TRUE(std::isfinite(BceFromLogit(800.0, 0.0)));
  EXPECT_TRUE(std::isfinite(BceFromLogit(-800.0, 1.0)));
}

TEST(NeuralTest, InitIsDeterministicWithZeroBiases) {
  const Network a = InitNetwork(18, 4);
  const Network b = InitNetwork(18, 4);
  ASSERT_EQ(a.params().size(), b.params().size());
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    EXPECT_EQ(a.params()[i].values, b.params()[i].values);
    const Tensor& t = a.params()[i];
    if (t.shape.size() == 1) {
      for (float v : t.values) EXPECT_EQ(v, 0.0f);
    } else {
      for (float v : t.values) {
        sum += v;
        sum_sq += static_cast<double>(v) * v;
        ++n;
      }
    }
  }
  ASSERT_GE(n, 10000u);
  const double mean = sum / n;
  const double sd = std::sqrt(sum_sq / n - mean * mean);
  EXPECT_LT(std::abs(mean), 3 * sd / std::sqrt(static_cast<double>(n)));
  EXPECT_NE(InitNetwork(18, 5).params()[0].values, a.params()[0].values);
  EXPECT_THROW(InitNetwork(17, 1), std::invalid_argument);
}

TEST(NeuralTest, GlorotBounds) {
  const Network net = InitNetwork(15, 2);
  const Tensor& first = net.params()[0];  // conv 8@5x5 on one channel
  const double limit = std::sqrt(6.0 / (25.0 + 8 * 25.0));
  for (float v : first.values) EXPECT_LE(std::abs(v), limit);
}

TEST(NeuralTest, ZeroNetworkOutputsOneHalf) {
  Network net = InitNetwork(36, 1);
  ZeroNetwork(net);
  Rng rng(1);
  for (double p : Forward(net, RandomPatch(rng))) EXPECT_EQ(p, 0.5);
}

TEST(NeuralTest, BiasShiftChangesOnlyItsHead) {
  Network net = InitNetwork(18, 3);
  Rng rng(3);
  const Patch patch = RandomPatch(rng);
  const std::vector<double> before = ForwardLogits(net, patch);
  net.mutable_params().back().values[5] += 0.75f;
  const std::vector<double> after = ForwardLogits(net, patch);
  for (int k = 0; k < 18; ++k) {
    if (k == 5) {
      EXPECT_NEAR(after[k], before[k] + 0.75, 1e-6);
      EXPECT_NEAR(Forward(net, patch)[k], Sigmoid(before[k] + 0.75), 1e-6);
    } else {
      EXPECT_EQ(after[k], before[k]);
    }
  }
}

TEST(NeuralTest, OutputsStrictlyInsideUnitInterval) {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    Network net = InitNetwork(15, i);
    for (Tensor& t : net.mutable_params()) {
      for (float& v : t.values) v = static_cast<float>(rng.Uniform(-10.0, 10.0));
    }
    for (double p : Forward(net, RandomPatch(rng))) {
      ASSERT_TRUE(std::isfinite(p));
      ASSERT_GE(p, 0.0);
      ASSERT_LE(p, 1.0);
    }
    const auto batch = RandomBatch(rng, 4, 15);
    const Gradients g = Backward(net, batch);
    ASSERT_TRUE(std::isfinite(g.loss));
    for (const auto& t : g.tensors) {
      for (double v : t) ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST(NeuralTest, SingleSampleBiasGradientIsResidual) {
  const Network net = InitNetwork(18, 6);
  Rng rng(6);
  TrainingSample s{RandomPatch(rng), 4, 0.3};
  const Gradients g = Backward(net, std::span(&s, 1));
  const double pred = Forward(net, s.patch)[4];
  const std::vector<double>& bias = g.tensors.back();
  for (int k = 0; k < 18; ++k) {
    EXPECT_NEAR(bias[k], k == 4 ? pred - 0.3 : 0.0, 1e-6);
  }
}

TEST(NeuralTest, MatchedTargetsGiveZeroBiasGradient) {
  const Network net = InitNetwork(15, 7);
  Rng rng(7);
  std::vector<TrainingSample> batch = RandomBatch(rng, 6, 15);
  for (TrainingSample& s : batch) s.target_value = Forward(net, s.patch)[s.target_index];
  const Gradients g = Backward(net, batch);
  for (const TrainingSample& s : batch) {
    EXPECT_NEAR(g.tensors.back()[s.target_index], 0.0, 1e-6);
  }
}

TEST(NeuralTest, MaskedLossTouchesOnlyTargetRow) {
  const Network net = InitNetwork(18, 9);
  Rng rng(9);
  TrainingSample s{RandomPatch(rng), 11, 1.0};
  const Gradients g = Backward(net, std::span(&s, 1));
  const Tensor& w = net.params()[net.params().size() - 2];
  ASSERT_EQ(w.shape.size(), 2u);
  ASSERT_EQ(w.shape[0], 18);
  const int in = w.shape[1];
  const std::vector<double>& gw = g.tensors[g.tensors.size() - 2];
  double target_row = 0.0;
  for (int o = 0; o < 18; ++o) {
    for (int i = 0; i < in; ++i) {
      if (o == 11) {
        target_row += std::abs(gw[o * in + i]);
      } else {
        ASSERT_EQ(gw[o * in + i], 0.0);
      }
    }
  }
  EXPECT_GT(target_row, 0.0);
}

TEST(NeuralTest, GradientMatchesFiniteDifferences) {
  for (int n = 0; n < 5; ++n) {
    const Network net = InitNetwork(n % 2 ? 18 : 15, 100 + n);
    for (int b = 0; b < 5; ++b) {
      Rng rng(DeriveSeed(n, {static_cast<std::uint64_t>(b)}));
      const auto batch = RandomBatch(rng, 4, net.n_outputs());
      const GradCheckResult r = GradCheck(net, batch, rng.NextU64());
      EXPECT_LE(r.max_relative_error, 1e-3) << n << "/" << b;
      EXPECT_GT(r.coordinates_checked, 50);
    }
  }
}

TEST(NeuralTest, GradCheckCatchesCorruptedDenseGradient) {
  const Network net = InitNetwork(18, 3);
  Rng rng(3);
  const auto batch = RandomBatch(rng, 4, 18);
  const GradCheckResult r = GradCheck(net, batch, 5, 100, [&](Gradients& g) {
    for (std::size_t t = 0; t < g.tensors.size(); ++t) {
      if (net.params()[t].shape.size() != 2) continue;  // dense weights
      for (double& v : g.tensors[t]) v *= 2.0;
    }
  });
  EXPECT_GE(r.max_relative_error, 0.1);
}

TEST(NeuralTest, SingleDenseNetGradientIsExact) {
  Rng rng(4);
  const Network net = InitNetwork(Architecture::SingleDense(18), 4);
  const auto batch = RandomBatch(rng, 8, 18);
  EXPECT_LE(GradCheck(net, batch, 1).max_relative_error, 1e-6);
}

TEST(NeuralTest, FastBackwardAgreesWithExact) {
  const Network net = InitNetwork(18, 10);
  Rng rng(10);
  const auto batch = RandomBatch(rng, 16, 18);
  std::vector<double> predictions;
  const Gradients exact = Backward(net, batch);
  const Gradients fast = BackwardFast(net, batch, &predictions);
  ASSERT_EQ(predictions.size(), batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_NEAR(predictions[i], Forward(net, batch[i].patch)[batch[i].target_index], 1e-5);
  }
  EXPECT_NEAR(fast.loss, exact.loss, 1e-5);
  for (std::size_t t = 0; t < exact.tensors.size(); ++t) {
    double scale = 1e-8;
    for (double v : exact.tensors[t]) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < exact.tensors[t].size(); ++i) {
      ASSERT_NEAR(fast.tensors[t][i], exact.tensors[t][i], 1e-3 * scale);
    }
  }
}

TEST(NeuralTest, RmsPropHandArithmetic) {
  Network net(Architecture::SingleDense(15), 0,
              {Tensor{"w", {15, 1024}, std::vector<float>(15 * 1024, 0.0f)},
               Tensor{"b", {15}, std::vector<float>(15, 0.0f)}});
  net.mutable_params()[1].values[0] = 1.0f;
  OptState opt = InitOptState(net);
  Gradients g;
  g.tensors = {std::vector<double>(15 * 1024, 0.0), std::vector<double>(15, 0.0)};
  g.tensors[1][0] = 2.0;
  RmsPropStep(net, g, opt);
  EXPECT_NEAR(opt.cache[1][0], 0.4, 1e-12);
  EXPECT_NEAR(net.params()[1].values[0], 1.0 - 0.001 * 2 / (std::sqrt(0.4) + 1e-8), 1e-7);
  EXPECT_NEAR(net.params()[1].values[0], 0.996838, 1e-6);
  const float w1 = net.params()[1].values[0];
  RmsPropStep(net, g, opt);
  EXPECT_LT(std::abs(net.params()[1].values[0] - w1), std::abs(w1 - 1.0f));
}

TEST(NeuralTest, RmsPropZeroGradientDecaysCache) {
  Network net = InitNetwork(15, 2);
  OptState opt = InitOptState(net);
  for (auto& c : opt.cache) std::fill(c.begin(), c.end(), 1.0);
  const Network before = net;
  Gradients g;
  for (const Tensor& t : net.params()) g.tensors.emplace_back(t.values.size(), 0.0);
  RmsPropStep(net, g, opt);
  for (std::size_t t = 0; t < net.params().size(); ++t) {
    EXPECT_EQ(net.params()[t].values, before.params()[t].values);
    for (double c : opt.cache[t]) EXPECT_DOUBLE_EQ(c, 0.9);
  }
}

std::vector<TrainingSample> LeftRightSet(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainingSample> set(n);
  for (int i = 0; i < n; ++i) {
    const bool left = i % 2 == 0;
    Patch& p = set[i].patch;
    for (int r = 0; r < kPatchSize; ++r) {
      for (int c = 0; c < kPatchSize; ++c) {
        const bool bright = (c < kPatchSize / 2) == left;
        p.pixels[r * kPatchSize + c] =
            static_cast<float>(bright ? rng.Uniform(0.6, 1.0) : rng.Uniform(0.0, 0.4));
      }
    }
    set[i].target_index = 2;
    set[i].target_value = left ? 1.0 : 0.0;
  }
  return set;
}

Network TrainLeftRight(int steps) {
  Network net = InitNetwork(18, 21);
  const auto set = LeftRightSet(256, 21);
  OptState opt = InitOptState(net);
  for (int step = 0; step < steps; ++step) {
    const std::size_t start = (step * 32) % set.size();
    RmsPropStep(net, BackwardFast(net, std::span(set).subspan(start, 32)), opt);
  }
  return net;
}

TEST(NeuralTest, LearnsSeparableSet) {
  const Network net = TrainLeftRight(200);
  const auto set = LeftRightSet(256, 21);
  int correct = 0;
  for (const TrainingSample& s : set) {
    correct += (Forward(net, s.patch)[2] > 0.5) == (s.target_value > 0.5);
  }
  EXPECT_GE(correct, 0.95 * set.size());
}

TEST(NeuralTest, TrainingIsBitwiseDeterministic) {
  const Network a = TrainLeftRight(20);
  const Network b = TrainLeftRight(20);
  for (std::size_t t = 0; t < a.params().size(); ++t) {
    EXPECT_EQ(a.params()[t].values, b.params()[t].values);
  }
}

TEST(NeuralTest, ArchitectureTextRoundTrip) {
  const Architecture a = Architecture::Default(36);
  EXPECT_EQ(Architecture::Parse(a.Describe()), a);
  EXPECT_EQ(a.n_outputs(), 36);
}

}  // namespace
}  // namespace advgrasp
