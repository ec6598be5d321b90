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

#ifndef ADVGRASP_GEOMETRY_H_
#define ADVGRASP_GEOMETRY_H_

#include <cmath>
#include <span>
#include <vector>

namespace advgrasp {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double Norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 Rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}
inline Vec2 UnitVector(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

// Signed shoelace area; positive for counter-clockwise polygons.
double SignedArea(std::span<const Vec2> polygon);
// Area centroid of a simple polygon.
Vec2 Centroid(std::span<const Vec2> polygon);
// Crossing-number membership test. Points exactly on the boundary may land
// on either side.
bool PointInPolygon(std::span<const Vec2> polygon, Vec2 p);
// True when no two non-adjacent edges intersect.
bool IsSimplePolygon(std::span<const Vec2> polygon);
// Interior angle at each vertex (radians, in (0, 2*pi)) for a CCW polygon.
std::vector<double> InteriorAngles(std::span<const Vec2> polygon);
bool IsConvex(std::span<const Vec2> polygon);
// Andrew's monotone chain; returns a CCW hull without collinear points.
std::vector<Vec2> ConvexHull(std::vector<Vec2> points);

double PointSegmentDistance(Vec2 p, Vec2 a, Vec2 b);
double SegmentSegmentDistance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

}  // namespace advgrasp

#endif  // ADVGRASP_GEOMETRY_H_
