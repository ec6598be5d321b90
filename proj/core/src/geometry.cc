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

#include "advgrasp/geometry.h"

#include <algorithm>

namespace advgrasp {

double SignedArea(std::span<const Vec2> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    twice += Cross(polygon[i], polygon[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Vec2 Centroid(std::span<const Vec2> polygon) {
  double twice_area = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = polygon[i], q = polygon[(i + 1) % n];
    const double c = Cross(p, q);
    twice_area += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (3.0 * twice_area), cy / (3.0 * twice_area)};
}

bool PointInPolygon(std::span<const Vec2> polygon, Vec2 p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[i], b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

namespace {

// Sign of the turn a -> b -> c; turns within rounding of zero count as
// collinear.
int Orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = Cross(b - a, c - a);
  const double tolerance = 1e-12 * Norm(b - a) * Norm(c - a);
  return (v > tolerance) - (v < -tolerance);
}

bool OnSegment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool SegmentsIntersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const int o1 = Orientation(a0, a1, b0), o2 = Orientation(a0, a1, b1);
  const int o3 = Orientation(b0, b1, a0), o4 = Orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && OnSegment(a0, a1, b0)) return true;
  if (o2 == 0 && OnSegment(a0, a1, b1)) return true;
  if (o3 == 0 && OnSegment(b0, b1, a0)) return true;
  if (o4 == 0 && OnSegment(b0, b1, a1)) return true;
  return false;
}

}  // namespace

bool IsSimplePolygon(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (SegmentsIntersect(polygon[i], polygon[(i + 1) % n], polygon[j],
                            polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

std::vector<double> InteriorAngles(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  std::vector<double> angles(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = polygon[(i + n - 1) % n];
    const Vec2 cur = polygon[i];
    const Vec2 next = polygon[(i + 1) % n];
    const Vec2 in = cur - prev, out = next - cur;
    // Left turn (positive cross) at a CCW vertex is convex.
    const double turn = std::atan2(Cross(in, out), Dot(in, out));
    angles[i] = kPi - turn;
  }
  return angles;
}

bool IsConvex(std::span<const Vec2> polygon) {
  for (double a : InteriorAngles(polygon)) {
    if (a > kPi) return false;
  }
  return true;
}

std::vector<Vec2> ConvexHull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Vec2> hull(2 * points.size());
  std::size_t k = 0;
  for (const Vec2& p : points) {
    while (k >= 2 && Cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2 p = points[i];
    while (k >= lower && Cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) {
      --k;
    }
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

double PointSegmentDistance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = Dot(ab, ab);
  if (len2 == 0.0) return Norm(p - a);
  const double t = std::clamp(Dot(p - a, ab) / len2, 0.0, 1.0);
  return Norm(p - (a + t * ab));
}

double SegmentSegmentDistance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (SegmentsIntersect(a0, a1, b0, b1)) return 0.0;
  return std::min({PointSegmentDistance(a0, b0, b1),
                   PointSegmentDistance(a1, b0, b1),
                   PointSegmentDistance(b0, a0, a1),
                   PointSegmentDistance(b1, a0, a1)});
}

}  // namespace advgrasp
