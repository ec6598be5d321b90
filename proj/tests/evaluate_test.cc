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

#include <vector>

#include "advgrasp/game_trainer.h"
#include "gtest/gtest.h"

namespace advgrasp {
namespace {

std::vector<ObjectShape> HeldOut() { return MakeObjectPool({4, 4, 2}, 2002); }

TEST(EvaluateTest, HundredTriesAndExactOverall) {
  const Network net = InitNetwork(18, 3);
  RegimeSpec regime = LowRegime();
  regime.n_candidates = 16;
  const EvalColumn col = Evaluate(net, HeldOut(), regime, {}, 10, 5);
  EXPECT_EQ(col.tries(), 100);
  ASSERT_EQ(col.objects.size(), 10u);
  EXPECT_DOUBLE_EQ(col.overall(), col.successes() / 100.0);
  EXPECT_LE(col.successes(), col.grasp_successes());
}

TEST(EvaluateTest, ConstantNetworksCollapseToTieRule) {
  Network zero = InitNetwork(18, 1);
  ZeroNetwork(zero);
  Network constant = zero;
  for (float& b : constant.mutable_params().back().values) b = -1.3f;
  RegimeSpec regime = LowRegime();
  regime.n_candidates = 16;
  const EvalColumn a = Evaluate(zero, HeldOut(), regime, {}, 10, 7);
  const EvalColumn b = Evaluate(constant, HeldOut(), regime, {}, 10, 7);
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    EXPECT_EQ(a.objects[i].successes, b.objects[i].successes);
    EXPECT_EQ(a.objects[i].grasp_successes, b.objects[i].grasp_successes);
  }
}

TEST(EvaluateTest, StrongerGripNeverLosesAGrasp) {
  const std::vector<Network> nets = {InitNetwork(18, 4), InitNetwork(18, 5)};
  RegimeSpec low = LowRegime();
  low.n_candidates = 32;
  RegimeSpec strong = low;
  strong.name = "strong";
  strong.grip_force = 35.0;
  const auto lo = EvaluateAll(nets, HeldOut(), low, {}, 10, 9);
  const auto hi = EvaluateAll(nets, HeldOut(), strong, {}, 10, 9);
  for (std::size_t n = 0; n < nets.size(); ++n) {
    for (std::size_t i = 0; i < lo[n].objects.size(); ++i) {
      EXPECT_GE(hi[n].objects[i].successes, lo[n].objects[i].successes);
    }
  }
}

TEST(EvaluateTest, SharedEvaluationMatchesSingle) {
  const std::vector<Network> nets = {InitNetwork(18, 6), InitNetwork(18, 7)};
  RegimeSpec regime = HighRegime();
  regime.n_candidates = 24;
  const auto all = EvaluateAll(nets, HeldOut(), regime, {}, 3, 11);
  for (std::size_t n = 0; n < nets.size(); ++n) {
    const EvalColumn one = Evaluate(nets[n], HeldOut(), regime, {}, 3, 11);
    for (std::size_t i = 0; i < one.objects.size(); ++i) {
      EXPECT_EQ(one.objects[i].successes, all[n].objects[i].successes);
      EXPECT_EQ(one.objects[i].grasp_successes, all[n].objects[i].grasp_successes);
    }
  }
}

TEST(EvaluateTest, LiftArithmetic) {
  ObjectShape o;
  o.mass = 1.0;
  o.friction_mu = 0.6;
  GraspOutcome out;
  out.success = true;
  out.margin = 1.0;  // holds 2 * 0.6 * 7 = 8.4 N
  EXPECT_FALSE(LiftHolds(out, o, {}));
  o.mass = 0.8;
  EXPECT_TRUE(LiftHolds(out, o, {}));
  const SimConfig high = RegimeSim({}, HighRegime());
  EXPECT_EQ(high.grip_force, 35.0);
  EXPECT_EQ(high.friction_scale, 1.25);
}

}  // namespace
}  // namespace advgrasp
