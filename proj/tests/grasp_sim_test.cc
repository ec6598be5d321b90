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

#include "advgrasp/grasp_sim.h"

#include <cmath>
#include <set>

#include "advgrasp/rng.h"
#include "gtest/gtest.h"

namespace advgrasp {
namespace {

constexpr double kRel = 1e-6;
const Pose kCenter{0.2, 0.2, 0.0};

ObjectShape Rectangle(double mass) {
  ObjectShape o;
  o.vertices = {{-0.04, -0.015}, {0.04, -0.015}, {0.04, 0.015}, {-0.04, 0.015}};
  o.mass = mass;
  o.friction_mu = 0.6;
  return o;
}

void ExpectRel(double actual, double expected) {
  EXPECT_NEAR(actual, expected, kRel * std::abs(expected));
}

TEST(GraspSimTest, ContactsOfCenteredGrasp) {
  const auto contacts = GraspContacts(Rectangle(0.2), kCenter, GraspAction{0.2, 0.2, 0});
  ASSERT_TRUE(contacts.has_value());
  EXPECT_NEAR(Norm(contacts->first - contacts->second), 0.03, 1e-12);
  EXPECT_NEAR(std::abs(Dot(contacts->closing, {0.0, 1.0})), 1.0, 1e-12);
}

TEST(GraspSimTest, MissingTheObjectGivesNoContacts) {
  EXPECT_FALSE(GraspContacts(Rectangle(0.2), kCenter, GraspAction{0.35, 0.35, 0}));
}

TEST(GraspSimTest, CenteredGraspHasUnitMargin) {
  const GraspOutcome out = GraspMargin(Rectangle(0.2), kCenter, GraspAction{0.2, 0.2, 0}, {});
  EXPECT_TRUE(out.success);
  EXPECT_NEAR(out.width, 0.03, 1e-12);
  EXPECT_NEAR(out.misalignment, 0.0, 1e-12);
  EXPECT_NEAR(out.com_offset, 0.0, 1e-12);
  ExpectRel(out.margin, 1.0);
}

TEST(GraspSimTest, HeavyObjectMarginIsForceLimited) {
  const GraspOutcome out = GraspMargin(Rectangle(2.0), kCenter, GraspAction{0.2, 0.2, 0}, {});
  EXPECT_TRUE(out.success);
  ExpectRel(out.margin, 8.4 / 58.86);
  EXPECT_NEAR(out.margin, 0.1427, 1e-4);
}

TEST(GraspSimTest, PayloadLimit) {
  const GraspOutcome out = GraspMargin(Rectangle(2.5), kCenter, GraspAction{0.2, 0.2, 0}, {});
  EXPECT_FALSE(out.success);
  EXPECT_EQ(out.margin, 0.0);
}

TEST(GraspSimTest, TooWideForTheJaws) {
  // Closing along the 0.08 m side exceeds the 0.06 m opening.
  const GraspOutcome out = GraspMargin(Rectangle(0.2), kCenter, GraspAction{0.2, 0.2, 9}, {});
  EXPECT_FALSE(out.success);
  EXPECT_EQ(out.margin, 0.0);
}

TEST(GraspSimTest, OffCenterGraspLosesComMargin) {
  const GraspOutcome out = GraspMargin(Rectangle(0.2), kCenter, GraspAction{0.22, 0.2, 0}, {});
  EXPECT_TRUE(out.success);
  EXPECT_NEAR(out.com_offset, 0.02, 1e-12);
  ExpectRel(out.margin, 1.0 - 0.02 / 0.03);
}

TEST(GraspSimTest, ShakeAcceleration) {
  const double a = 0.025 * std::pow(2 * kPi * 2.0, 2);
  ExpectRel(ShakeAcceleration({}), a);
  EXPECT_NEAR(ShakeAcceleration({}), 3.948, 1e-3);
}

TEST(GraspSimTest, ShakeSeverityRange) {
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < kNumShakeActions; ++i) {
    lo = std::min(lo, ShakeSeverity(i));
    hi = std::max(hi, ShakeSeverity(i));
  }
  EXPECT_DOUBLE_EQ(lo, 0.25);
  EXPECT_DOUBLE_EQ(hi, 1.0);
}

TEST(GraspSimTest, LightObjectSurvivesWorstShake) {
  const ObjectShape o = Rectangle(0.2);
  const GraspAction g{0.2, 0.2, 0};
  const GraspOutcome out = GraspMargin(o, kCenter, g, {});
  for (int i = 0; i < kNumShakeActions; ++i) {
    if (ShakeSeverity(i) != 1.0) continue;
    const ForceBalance f = ShakeForces(out, o, {}, i);
    ExpectRel(f.demand, 0.2 * (9.81 + ShakeAcceleration({})));
    EXPECT_NEAR(f.demand, 2.752, 1e-3);
    ExpectRel(f.hold, 8.4);
  }
  for (int i = 0; i < kNumShakeActions; ++i) {
    EXPECT_FALSE(ApplyShake(out, g, o, {}, {AdversaryKind::kShake, i}));
  }
}

TEST(GraspSimTest, HeavyObjectIsDislodgedByWorstShake) {
  const ObjectShape o = Rectangle(2.0);
  const GraspAction g{0.2, 0.2, 0};
  const GraspOutcome out = GraspMargin(o, kCenter, g, {});
  for (int i = 0; i < kNumShakeActions; ++i) {
    const ForceBalance f = ShakeForces(out, o, {}, i);
    ExpectRel(f.hold, 8.4 * 8.4 / 58.86);
    if (ShakeSeverity(i) == 1.0) {
      ExpectRel(f.demand, 2.0 * (9.81 + ShakeAcceleration({})));
      EXPECT_NEAR(f.demand, 27.52, 1e-2);
    }
    EXPECT_TRUE(ApplyShake(out, g, o, {}, {AdversaryKind::kShake, i}));
  }
}

TEST(GraspSimTest, DecodeBijections) {
  std::set<std::pair<int, int>> shake, snatch;
  for (int i = 0; i < kNumShakeActions; ++i) {
    const ShakeDecoded d = DecodeShake(i);
    EXPECT_EQ(i, 3 * d.orientation + d.direction);
    EXPECT_EQ(EncodeShake(d), i);
    shake.insert({d.orientation, d.direction});
  }
  for (int i = 0; i < kNumSnatchActions; ++i) {
    const SnatchDecoded d = DecodeSnatch(i);
    EXPECT_EQ(i, 4 * d.offset_cell + d.rotation);
    EXPECT_EQ(EncodeSnatch(d), i);
    snatch.insert({d.offset_cell, d.rotation});
  }
  EXPECT_EQ(shake.size(), 15u);
  EXPECT_EQ(snatch.size(), 36u);
  EXPECT_THROW(DecodeShake(15), ContractViolation);
  EXPECT_THROW(DecodeSnatch(-1), ContractViolation);
}

TEST(GraspSimTest, PerturbingAFailedGraspViolatesContract) {
  const ObjectShape o = Rectangle(0.2);
  const GraspAction g{0.35, 0.35, 0};
  const GraspOutcome out = GraspMargin(o, kCenter, g, {});
  ASSERT_FALSE(out.success);
  EXPECT_THROW(ApplyShake(out, g, o, {}, {AdversaryKind::kShake, 0}), ContractViolation);
  EXPECT_THROW(ApplySnatch(out, g, o, kCenter, {}, {AdversaryKind::kSnatch, 0}),
               ContractViolation);
  const GraspOutcome ok = GraspMargin(o, kCenter, GraspAction{0.2, 0.2, 0}, {});
  EXPECT_THROW(ApplyShake(ok, g, o, {}, {AdversaryKind::kSnatch, 0}), ContractViolation);
}

TEST(GraspSimTest, SnatchOnTopOfTheJawsIsInvalid) {
  const ObjectShape o = Rectangle(0.2);
  const GraspAction g{0.2, 0.2, 0};
  const GraspOutcome out = GraspMargin(o, kCenter, g, {});
  const SnatchResult r = EvaluateSnatch(out, g, o, kCenter, {}, EncodeSnatch({4, 0}));
  EXPECT_FALSE(r.valid);
  EXPECT_FALSE(r.dislodged);
}

TEST(GraspSimTest, WeakHoldArithmetic) {
  const double hold = 2 * 0.6 * 7 * (8.4 / 58.86);
  EXPECT_NEAR(hold, 1.199, 1e-3);
  EXPECT_GT(10.0 * 0.5, hold);
}

TEST(GraspSimTest, SnatchBeatsWeakHold) {
  // 1 kg bar held 2 cm off its centre; the second gripper takes the centre.
  const ObjectShape o = Rectangle(1.0);
  const GraspAction g{0.22, 0.2, 0};
  const SimConfig config;
  const GraspOutcome out = GraspMargin(o, kCenter, g, config);
  ASSERT_TRUE(out.success);
  const double m_f = 2 * 0.6 * 7 / (3 * 1.0 * 9.81);
  ExpectRel(out.margin, (1.0 / 3.0) * m_f);
  const SnatchResult r = EvaluateSnatch(out, g, o, kCenter, config, EncodeSnatch({3, 0}));
  ASSERT_TRUE(r.valid);
  ExpectRel(r.quality, 2 * 0.6 * 10 / (3 * 1.0 * 9.81));
  ExpectRel(r.pull, 10.0 * r.quality);
  ExpectRel(r.hold, 8.4 * out.margin);
  EXPECT_TRUE(r.dislodged);
  // The mirrored cell sits on the bar's end and cannot pull it away.
  EXPECT_FALSE(EvaluateSnatch(out, g, o, kCenter, config, EncodeSnatch({5, 0})).dislodged);
}

struct Trial {
  ObjectShape object;
  Pose pose;
  GraspAction grasp;
};

Trial RandomTrial(Rng& rng) {
  const Difficulty d = static_cast<Difficulty>(rng.Below(3));
  Trial t;
  t.object = GenerateObject(rng.NextU64(), d);
  t.pose = PlaceObject(t.object, rng.NextU64()).pose;
  const Vec2 c = WorldCom(t.object, t.pose);
  t.grasp = {c.x + rng.Uniform(-0.02, 0.02), c.y + rng.Uniform(-0.02, 0.02),
             static_cast<int>(rng.Below(kNumAngleBins))};
  return t;
}

bool HeldAfterShake(const Trial& t, const SimConfig& config, int action) {
  const GraspOutcome out = GraspMargin(t.object, t.pose, t.grasp, config);
  return out.success && !ApplyShake(out, t.grasp, t.object, config, {AdversaryKind::kShake, action});
}

bool HeldAfterSnatch(const Trial& t, const SimConfig& config, int action) {
  const GraspOutcome out = GraspMargin(t.object, t.pose, t.grasp, config);
  return out.success &&
         !ApplySnatch(out, t.grasp, t.object, t.pose, config, {AdversaryKind::kSnatch, action});
}

TEST(GraspSimTest, MarginBoundsOverRandomGrasps) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const Trial t = RandomTrial(rng);
    const GraspOutcome out = GraspMargin(t.object, t.pose, t.grasp, {});
    ASSERT_GE(out.margin, 0.0);
    ASSERT_LE(out.margin, 1.0);
    ASSERT_EQ(out.margin == 0.0, !out.success);
  }
}

TEST(GraspSimTest, MonotoneInGripForce) {
  Rng rng(6);
  int held_low = 0, informative = 0;
  for (int i = 0; i < 10000; ++i) {
    const Trial t = RandomTrial(rng);
    SimConfig low, high;
    low.grip_force = rng.Uniform(1.0, 40.0);
    high.grip_force = low.grip_force + rng.Uniform(0.0, 40.0);
    const int shake = static_cast<int>(rng.Below(kNumShakeActions));
    const int snatch = static_cast<int>(rng.Below(kNumSnatchActions));
    const bool lo = HeldAfterShake(t, low, shake);
    const bool hi = HeldAfterShake(t, high, shake);
    ASSERT_TRUE(!lo || hi) << i;
    ASSERT_TRUE(!HeldAfterSnatch(t, low, snatch) || HeldAfterSnatch(t, high, snatch)) << i;
    held_low += lo;
    informative += hi && !lo;
  }
  EXPECT_GT(held_low, 0);
  EXPECT_GT(informative, 0);
}

TEST(GraspSimTest, ShakeMonotoneInMass) {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    Trial light = RandomTrial(rng);
    Trial heavy = light;
    light.object.mass = rng.Uniform(0.05, 2.5);
    heavy.object.mass = light.object.mass + rng.Uniform(0.0, 1.0);
    const int action = static_cast<int>(rng.Below(kNumShakeActions));
    ASSERT_TRUE(HeldAfterShake(light, {}, action) || !HeldAfterShake(heavy, {}, action)) << i;
  }
}

// Exhaustive 4 px lattice over the object's bounding box and all angle bins.
TEST(GraspSimTest, BruteForceFindsAGraspForEveryEasyAndMediumObject) {
  SimConfig config;
  config.grip_force = 35.0;
  const double step = 4 * kMetersPerPixel;
  for (Difficulty d : {Difficulty::kEasy, Difficulty::kMedium}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const ObjectShape o = GenerateObject(seed, d);
      const Scene scene = PlaceObject(o, seed);
      double x0 = 1, x1 = 0, y0 = 1, y1 = 0;
      for (const Vec2& v : WorldVertices(o, scene.pose)) {
        x0 = std::min(x0, v.x), x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
      }
      bool found = false;
      for (double x = std::floor(x0 / step) * step; x <= x1 && !found; x += step) {
        for (double y = std::floor(y0 / step) * step; y <= y1 && !found; y += step) {
          for (int b = 0; b < kNumAngleBins && !found; ++b) {
            found = GraspMargin(o, scene.pose, GraspAction{x, y, b}, config).success;
          }
        }
      }
      EXPECT_TRUE(found) << DifficultyName(d) << " seed " << seed;
    }
  }
}

}  // namespace
}  // namespace advgrasp
