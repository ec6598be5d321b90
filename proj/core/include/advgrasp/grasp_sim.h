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

#ifndef ADVGRASP_GRASP_SIM_H_
#define ADVGRASP_GRASP_SIM_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "advgrasp/geometry.h"
#include "advgrasp/scene.h"

namespace advgrasp {

inline constexpr int kNumAngleBins = 18;
inline constexpr double kAngleBinWidth = kPi / kNumAngleBins;  // 10 degrees
inline constexpr int kNumShakeActions = 15;
inline constexpr int kNumSnatchActions = 36;
inline constexpr double kGravity = 9.81;

// Planar parallel-jaw grasp; the jaws close along the direction
// perpendicular to the grasp angle.
struct GraspAction {
  double x = 0.0;
  double y = 0.0;
  int theta_bin = 0;

  double angle() const { return theta_bin * kAngleBinWidth; }
  Vec2 center() const { return {x, y}; }
};

// Continuous-angle grasp used internally (snatch grasps are not on the
// 10 degree lattice).
struct PlanarGrasp {
  Vec2 center;
  double angle = 0.0;

  static PlanarGrasp From(const GraspAction& g) { return {g.center(), g.angle()}; }
};

struct Contacts {
  Vec2 first;            // contact met by the jaw moving along +closing
  Vec2 second;           // contact met by the jaw moving along -closing
  Vec2 first_normal;     // outward edge normal at `first`
  Vec2 second_normal;
  Vec2 closing;          // unit closing direction
};

struct GraspOutcome {
  bool success = false;
  double margin = 0.0;
  double width = 0.0;
  std::optional<Contacts> contacts;
  double com_offset = 0.0;
  double misalignment = 0.0;  // worse contact-normal angle to the jaw axis
};

enum class AdversaryKind { kShake, kSnatch };

std::string_view AdversaryKindName(AdversaryKind kind);
std::optional<AdversaryKind> ParseAdversaryKind(std::string_view name);
int NumActions(AdversaryKind kind);

struct AdversaryAction {
  AdversaryKind kind = AdversaryKind::kShake;
  int index = 0;
};

struct SimConfig {
  double grip_force = 7.0;      // N
  double max_payload = 2.2;     // kg
  double max_width = 0.06;      // m, jaw opening
  double shake_freq = 2.0;      // Hz
  double shake_amp = 0.025;     // m
  double lever_gain = 20.0;     // 1/m
  double pull_force = 10.0;     // N
  double clearance = 0.01;      // m
  double friction_scale = 1.0;  // multiplies object friction (grip pads)
};

// Raised when a simulator entry point is called outside its contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

double EffectiveFriction(const ObjectShape& object, const SimConfig& config);

// Intersects the closing line with the object outline. Returns the extreme
// boundary crossings of the inside-intervals that overlap the jaw opening,
// or nothing when the line misses the object or the grasp centre is not
// between the two contacts.
std::optional<Contacts> GraspContacts(const ObjectShape& object,
                                      const Pose& pose, const PlanarGrasp& grasp,
                                      double max_width = SimConfig{}.max_width);
std::optional<Contacts> GraspContacts(const ObjectShape& object,
                                      const Pose& pose, const GraspAction& grasp,
                                      double max_width = SimConfig{}.max_width);

GraspOutcome GraspMargin(const ObjectShape& object, const Pose& pose,
                         const PlanarGrasp& grasp, const SimConfig& config);
GraspOutcome GraspMargin(const ObjectShape& object, const Pose& pose,
                         const GraspAction& grasp, const SimConfig& config);

struct ShakeDecoded {
  int orientation = 0;  // 0..4, wrist rotation of 45 degree steps
  int direction = 0;    // 0..2 -> x, y, z of the rotated wrist frame
};
ShakeDecoded DecodeShake(int index);
int EncodeShake(ShakeDecoded decoded);

struct SnatchDecoded {
  int offset_cell = 0;  // 0..8 on the 3x3 grid, row-major
  int rotation = 0;     // 0..3 -> 0, 45, 90, 135 degrees
};
SnatchDecoded DecodeSnatch(int index);
int EncodeSnatch(SnatchDecoded decoded);

// Peak acceleration of the sinusoidal shake.
double ShakeAcceleration(const SimConfig& config);
double ShakeSeverity(int index);

struct ForceBalance {
  double demand = 0.0;  // N
  double hold = 0.0;    // N
};
ForceBalance ShakeForces(const GraspOutcome& outcome, const ObjectShape& object,
                         const SimConfig& config, int index);

bool ApplyShake(const GraspOutcome& outcome, const GraspAction& grasp,
                const ObjectShape& object, const SimConfig& config,
                const AdversaryAction& action);

// Grasp the second arm attempts for a snatch action.
PlanarGrasp SnatchGrasp(const GraspAction& grasp, int index);

struct SnatchResult {
  bool valid = false;
  double quality = 0.0;  // margin of the snatching grasp
  double pull = 0.0;     // N
  double hold = 0.0;     // N
  bool dislodged = false;
};
SnatchResult EvaluateSnatch(const GraspOutcome& outcome, const GraspAction& grasp,
                            const ObjectShape& object, const Pose& pose,
                            const SimConfig& config, int index);

bool ApplySnatch(const GraspOutcome& outcome, const GraspAction& grasp,
                 const ObjectShape& object, const Pose& pose,
                 const SimConfig& config, const AdversaryAction& action);

}  // namespace advgrasp

#endif  // ADVGRASP_GRASP_SIM_H_
