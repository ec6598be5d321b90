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

#include <algorithm>
#include <cmath>
#include <vector>

namespace advgrasp {

namespace {

constexpr double kSnatchGridSpacing = 0.02;  // m

struct Crossing {
  double t;
  Vec2 normal;
};

}  // namespace

std::string_view AdversaryKindName(AdversaryKind kind) {
  return kind == AdversaryKind::kShake ? "shake" : "snatch";
}

std::optional<AdversaryKind> ParseAdversaryKind(std::string_view name) {
  if (name == "shake") return AdversaryKind::kShake;
  if (name == "snatch") return AdversaryKind::kSnatch;
  return std::nullopt;
}

int NumActions(AdversaryKind kind) {
  return kind == AdversaryKind::kShake ? kNumShakeActions : kNumSnatchActions;
}

double EffectiveFriction(const ObjectShape& object, const SimConfig& config) {
  return object.friction_mu * config.friction_scale;
}

std::optional<Contacts> GraspContacts(const ObjectShape& object,
                                      const Pose& pose, const PlanarGrasp& grasp,
                                      double max_width) {
  const std::vector<Vec2> poly = WorldVertices(object, pose);
  const Vec2 origin = grasp.center;
  const Vec2 closing{-std::sin(grasp.angle), std::cos(grasp.angle)};

  std::vector<Crossing> crossings;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const double sa = Cross(closing, a - origin);
    const double sb = Cross(closing, b - origin);
    if ((sa > 0) == (sb > 0)) continue;
    const double lambda = sa / (sa - sb);
    const Vec2 hit = a + lambda * (b - a);
    const Vec2 edge = b - a;
    const double len = Norm(edge);
    crossings.push_back({Dot(hit - origin, closing),
                         Vec2{edge.y / len, -edge.x / len}});
  }
  if (crossings.size() < 2) return std::nullopt;
  std::sort(crossings.begin(), crossings.end(),
            [](const Crossing& l, const Crossing& r) { return l.t < r.t; });

  const double half = 0.5 * max_width;
  const Crossing* lo = nullptr;
  const Crossing* hi = nullptr;
  for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
    const Crossing& enter = crossings[i];
    const Crossing& leave = crossings[i + 1];
    if (leave.t < -half || enter.t > half) continue;
    if (lo == nullptr) lo = &enter;
    hi = &leave;
  }
  if (lo == nullptr || lo->t > 0.0 || hi->t < 0.0) return std::nullopt;

  Contacts contacts;
  contacts.first = origin + lo->t * closing;
  contacts.second = origin + hi->t * closing;
  contacts.first_normal = lo->normal;
  contacts.second_normal = hi->normal;
  contacts.closing = closing;
  return contacts;
}

std::optional<Contacts> GraspContacts(const ObjectShape& object,
                                      const Pose& pose, const GraspAction& grasp,
                                      double max_width) {
  return GraspContacts(object, pose, PlanarGrasp::From(grasp), max_width);
}

GraspOutcome GraspMargin(const ObjectShape& object, const Pose& pose,
                         const PlanarGrasp& grasp, const SimConfig& config) {
  GraspOutcome out;
  const std::optional<Contacts> contacts =
      GraspContacts(object, pose, grasp, config.max_width);
  if (!contacts) return out;

  const Vec2 d = contacts->closing;
  out.contacts = contacts;
  out.width = Dot(contacts->second - contacts->first, d);
  const double phi_first =
      std::acos(std::clamp(-Dot(contacts->first_normal, d), -1.0, 1.0));
  const double phi_second =
      std::acos(std::clamp(Dot(contacts->second_normal, d), -1.0, 1.0));
  out.misalignment = std::max(phi_first, phi_second);
  out.com_offset = std::abs(Cross(d, WorldCom(object, pose) - grasp.center));

  const double mu = EffectiveFriction(object, config);
  const double cone = std::atan(mu);
  const bool fits = out.width > 0.0 && out.width <= config.max_width;
  const bool antipodal = out.misalignment < cone;
  const bool balanced = out.com_offset < out.width;
  const bool liftable = object.mass <= config.max_payload;
  out.success = fits && antipodal && balanced && liftable;
  if (!out.success) return out;

  const double m_align = 1.0 - out.misalignment / cone;
  const double m_com = 1.0 - out.com_offset / out.width;
  const double m_force = std::min(
      1.0, 2.0 * mu * config.grip_force / (3.0 * object.mass * kGravity));
  out.margin = m_align * m_com * m_force;
  return out;
}

GraspOutcome GraspMargin(const ObjectShape& object, const Pose& pose,
                         const GraspAction& grasp, const SimConfig& config) {
  return GraspMargin(object, pose, PlanarGrasp::From(grasp), config);
}

ShakeDecoded DecodeShake(int index) {
  if (index < 0 || index >= kNumShakeActions) {
    throw ContractViolation("shake index out of range");
  }
  return {index / 3, index % 3};
}

int EncodeShake(ShakeDecoded decoded) {
  return 3 * decoded.orientation + decoded.direction;
}

SnatchDecoded DecodeSnatch(int index) {
  if (index < 0 || index >= kNumSnatchActions) {
    throw ContractViolation("snatch index out of range");
  }
  return {index / 4, index % 4};
}

int EncodeSnatch(SnatchDecoded decoded) {
  return 4 * decoded.offset_cell + decoded.rotation;
}

double ShakeAcceleration(const SimConfig& config) {
  const double omega = 2.0 * kPi * config.shake_freq;
  return config.shake_amp * omega * omega;
}

double ShakeSeverity(int index) {
  const ShakeDecoded d = DecodeShake(index);
  // The wrist turns about the approach axis, so the world-fixed shake
  // direction projects onto the rotated jaw axis by cos/sin of the turn.
  const double psi = d.orientation * (kPi / 4.0);
  double along_jaw = 0.0;
  if (d.direction == 0) along_jaw = std::abs(std::cos(psi));
  if (d.direction == 1) along_jaw = std::abs(std::sin(psi));
  return 0.25 + 0.75 * along_jaw;
}

ForceBalance ShakeForces(const GraspOutcome& outcome, const ObjectShape& object,
                         const SimConfig& config, int index) {
  const double a = ShakeAcceleration(config);
  const double sigma = ShakeSeverity(index);
  ForceBalance f;
  f.demand = object.mass *
             (kGravity + a * sigma * (1.0 + config.lever_gain * outcome.com_offset));
  f.hold = 2.0 * EffectiveFriction(object, config) * config.grip_force *
           outcome.margin;
  return f;
}

bool ApplyShake(const GraspOutcome& outcome, const GraspAction& /*grasp*/,
                const ObjectShape& object, const SimConfig& config,
                const AdversaryAction& action) {
  if (!outcome.success) {
    throw ContractViolation("shake applied to a failed grasp");
  }
  if (action.kind != AdversaryKind::kShake) {
    throw ContractViolation("ApplyShake needs a shake action");
  }
  const ForceBalance f = ShakeForces(outcome, object, config, action.index);
  return f.demand > f.hold;
}

PlanarGrasp SnatchGrasp(const GraspAction& grasp, int index) {
  const SnatchDecoded d = DecodeSnatch(index);
  const Vec2 cell{((d.offset_cell % 3) - 1) * kSnatchGridSpacing,
                  ((d.offset_cell / 3) - 1) * kSnatchGridSpacing};
  PlanarGrasp out;
  out.center = grasp.center() + Rotate(cell, grasp.angle());
  out.angle = grasp.angle() + d.rotation * (kPi / 4.0);
  return out;
}

SnatchResult EvaluateSnatch(const GraspOutcome& outcome, const GraspAction& grasp,
                            const ObjectShape& object, const Pose& pose,
                            const SimConfig& config, int index) {
  if (!outcome.success || !outcome.contacts) {
    throw ContractViolation("snatch applied to a failed grasp");
  }
  SnatchResult result;
  SimConfig snatch_config = config;
  snatch_config.grip_force = config.pull_force;
  const GraspOutcome snatch =
      GraspMargin(object, pose, SnatchGrasp(grasp, index), snatch_config);
  result.hold = 2.0 * EffectiveFriction(object, config) * config.grip_force *
                outcome.margin;
  if (!snatch.success) return result;
  const double gap = SegmentSegmentDistance(
      outcome.contacts->first, outcome.contacts->second,
      snatch.contacts->first, snatch.contacts->second);
  if (gap < config.clearance) return result;
  result.valid = true;
  result.quality = snatch.margin;
  result.pull = config.pull_force * snatch.margin;
  result.dislodged = result.pull > result.hold;
  return result;
}

bool ApplySnatch(const GraspOutcome& outcome, const GraspAction& grasp,
                 const ObjectShape& object, const Pose& pose,
                 const SimConfig& config, const AdversaryAction& action) {
  if (action.kind != AdversaryKind::kSnatch) {
    throw ContractViolation("ApplySnatch needs a snatch action");
  }
  return EvaluateSnatch(outcome, grasp, object, pose, config, action.index)
      .dislodged;
}

}  // namespace advgrasp
