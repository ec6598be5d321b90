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

#include "advgrasp/scene.h"

#include <algorithm>
#include <cmath>

#include "advgrasp/rng.h"

namespace advgrasp {

std::string_view DifficultyName(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy:
      return "easy";
    case Difficulty::kMedium:
      return "medium";
    case Difficulty::kHard:
      return "hard";
  }
  return "easy";
}

std::optional<Difficulty> ParseDifficulty(std::string_view name) {
  if (name == "easy") return Difficulty::kEasy;
  if (name == "medium") return Difficulty::kMedium;
  if (name == "hard") return Difficulty::kHard;
  return std::nullopt;
}

namespace {

struct MassRange {
  double lo, hi;
  double area_lo, area_hi;  // typical area span used to bias mass by size
};

MassRange MassRangeFor(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy:
      return {0.05, 0.4, 0.6e-3, 4.5e-3};
    case Difficulty::kMedium:
      return {0.2, 1.0, 0.8e-3, 5.0e-3};
    case Difficulty::kHard:
      return {0.5, 2.5, 1.5e-3, 9.0e-3};
  }
  return {0.05, 0.4, 0.6e-3, 4.5e-3};
}

std::vector<Vec2> EasyOutline(Rng& rng) {
  const int n = rng.UniformInt(4, 6);
  const double a = rng.Uniform(0.025, 0.07);
  const double b = rng.Uniform(0.010, 0.024);
  const double offset = rng.Uniform(0.0, 2.0 * kPi);
  const double step = 2.0 * kPi / n;
  std::vector<Vec2> pts;
  for (int k = 0; k < n; ++k) {
    const double t = offset + k * step + rng.Uniform(-0.2, 0.2) * step;
    pts.push_back({a * std::cos(t), b * std::sin(t)});
  }
  return pts;  // points on an ellipse in angular order: convex, CCW
}

std::vector<Vec2> MediumOutline(Rng& rng) {
  const double a = rng.Uniform(0.03, 0.08);
  const double b = rng.Uniform(0.012, 0.025);
  std::vector<Vec2> hull;
  while (hull.size() < 5) {
    std::vector<Vec2> pts;
    const int n = rng.UniformInt(7, 10);
    for (int k = 0; k < n; ++k) {
      const double t = rng.Uniform(0.0, 2.0 * kPi);
      const double r = std::sqrt(rng.Uniform(0.55, 1.0));
      pts.push_back({a * r * std::cos(t), b * r * std::sin(t)});
    }
    hull = ConvexHull(std::move(pts));
  }
  // Notch: pull the midpoint of the longest edge toward the centroid.
  const Vec2 center = Centroid(hull);
  std::size_t longest = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const double len = Norm(hull[(i + 1) % hull.size()] - hull[i]);
    if (len > best) {
      best = len;
      longest = i;
    }
  }
  const Vec2 p = hull[longest], q = hull[(longest + 1) % hull.size()];
  const Vec2 mid = 0.5 * (p + q);
  const double depth = rng.Uniform(0.2, 0.45);
  const Vec2 notch = mid + depth * (center - mid);
  hull.insert(hull.begin() + static_cast<std::ptrdiff_t>(longest) + 1, notch);
  return hull;
}

std::vector<Vec2> HardOutline(Rng& rng) {
  const double len1 = rng.Uniform(0.06, 0.16);
  const double len2 = rng.Uniform(0.05, 0.14);
  const double w1 = rng.Uniform(0.015, 0.035);
  const double w2 = rng.Uniform(0.015, 0.035);
  if (rng.Uniform() < 0.5) {
    // L: horizontal bar along x, vertical bar along y, sharing a corner.
    return {{0, 0}, {len1, 0}, {len1, w1}, {w2, w1}, {w2, len2}, {0, len2}};
  }
  // T: bar on top, stem hanging from its middle.
  const double h1 = 0.5 * len1, h2 = 0.5 * w2;
  return {{-h2, -len2}, {h2, -len2}, {h2, 0},   {h1, 0},
          {h1, w1},     {-h1, w1},   {-h1, 0}, {-h2, 0}};
}

}  // namespace

ObjectShape GenerateObject(std::uint64_t seed, Difficulty difficulty) {
  Rng rng(DeriveSeed(seed, {0x0b1ec7, static_cast<std::uint64_t>(difficulty)}));
  std::vector<Vec2> outline;
  switch (difficulty) {
    case Difficulty::kEasy:
      outline = EasyOutline(rng);
      break;
    case Difficulty::kMedium:
      outline = MediumOutline(rng);
      break;
    case Difficulty::kHard:
      outline = HardOutline(rng);
      break;
  }
  if (SignedArea(outline) < 0) std::reverse(outline.begin(), outline.end());

  const double spin = rng.Uniform(0.0, 2.0 * kPi);
  const Vec2 c = Centroid(outline);
  for (Vec2& v : outline) v = Rotate(v - c, spin);

  ObjectShape object;
  object.vertices = std::move(outline);
  object.com = Centroid(object.vertices);
  object.seed = seed;
  object.difficulty = difficulty;
  object.id = DeriveSeed(seed, {0x1d, static_cast<std::uint64_t>(difficulty)});

  const MassRange range = MassRangeFor(difficulty);
  const double area = SignedArea(object.vertices);
  const double size_frac = std::clamp(
      (area - range.area_lo) / (range.area_hi - range.area_lo), 0.0, 1.0);
  const double frac = std::clamp(0.6 * size_frac + 0.4 * rng.Uniform(), 0.0, 1.0);
  object.mass = range.lo + (range.hi - range.lo) * frac;
  object.friction_mu = rng.Uniform(0.4, 0.8);
  return object;
}

std::vector<Vec2> WorldVertices(const ObjectShape& object, const Pose& pose) {
  std::vector<Vec2> out;
  out.reserve(object.vertices.size());
  for (const Vec2& v : object.vertices) {
    out.push_back(Rotate(v, pose.phi) + Vec2{pose.x, pose.y});
  }
  return out;
}

Vec2 WorldCom(const ObjectShape& object, const Pose& pose) {
  return Rotate(object.com, pose.phi) + Vec2{pose.x, pose.y};
}

Scene PlaceObject(const ObjectShape& object, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, {0x9053}));
  double radius = 0.0;
  for (const Vec2& v : object.vertices) radius = std::max(radius, Norm(v));
  const double lo = radius + 2.0 * kMetersPerPixel;
  const double hi = kWorkspaceSize - lo;
  Scene scene;
  scene.seed = seed;
  scene.pose.phi = rng.Uniform(0.0, 2.0 * kPi);
  scene.pose.x = lo < hi ? rng.Uniform(lo, hi) : 0.5 * kWorkspaceSize;
  scene.pose.y = lo < hi ? rng.Uniform(lo, hi) : 0.5 * kWorkspaceSize;
  scene.object = object;
  return scene;
}

Scene EmptyScene(std::uint64_t seed) {
  Scene scene;
  scene.seed = seed;
  return scene;
}

Image RenderScene(const Scene& scene) {
  Image image;
  if (!scene.object) return image;
  const std::vector<Vec2> poly = WorldVertices(*scene.object, scene.pose);
  double min_x = kWorkspaceSize, min_y = kWorkspaceSize, max_x = 0, max_y = 0;
  for (const Vec2& v : poly) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  const auto to_index = [](double m) {
    return std::clamp(static_cast<int>(std::floor(m / kMetersPerPixel)), 0,
                      kImageSize - 1);
  };
  const std::uint64_t id = scene.object->id;
  for (int r = to_index(min_y); r <= to_index(max_y); ++r) {
    for (int c = to_index(min_x); c <= to_index(max_x); ++c) {
      const Vec2 center{(c + 0.5) * kMetersPerPixel, (r + 0.5) * kMetersPerPixel};
      if (!PointInPolygon(poly, center)) continue;
      const std::uint64_t h =
          Mix64(id ^ Mix64(static_cast<std::uint64_t>(r) * kImageSize + c));
      const double noise = static_cast<double>(h >> 11) * 0x1.0p-53;
      image.at(r, c) = static_cast<float>(0.2 + 0.6 * noise);
    }
  }
  return image;
}

namespace {

double Bilinear(const Image& image, double fx, double fy) {
  int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  if (fx < x0) --x0;
  if (fy < y0) --y0;
  const double tx = fx - x0, ty = fy - y0;
  double p00, p01, p10, p11;
  if (x0 >= 0 && y0 >= 0 && x0 + 1 < kImageSize && y0 + 1 < kImageSize) {
    const float* row = &image.pixels[static_cast<std::size_t>(y0) * kImageSize + x0];
    p00 = row[0];
    p01 = row[1];
    p10 = row[kImageSize];
    p11 = row[kImageSize + 1];
  } else {
    const auto px = [&](int r, int c) -> double {
      if (r < 0 || c < 0 || r >= kImageSize || c >= kImageSize) return 0.0;
      return image.at(r, c);
    };
    p00 = px(y0, x0);
    p01 = px(y0, x0 + 1);
    p10 = px(y0 + 1, x0);
    p11 = px(y0 + 1, x0 + 1);
  }
  const double top = (1 - tx) * p00 + tx * p01;
  const double bottom = (1 - tx) * p10 + tx * p11;
  return (1 - ty) * top + ty * bottom;
}

}  // namespace

std::vector<float> ExtractRotatedCrop(const Image& image, Vec2 center,
                                      double angle) {
  std::vector<float> crop(kCropSize * kCropSize);
  const double dx = image.meters_per_pixel;
  const double c = std::cos(angle), s = std::sin(angle);
  constexpr double kHalf = 0.5 * (kCropSize - 1);
  // Sample positions in pixel units: the crop grid spacing equals one pixel.
  const double fx0 = center.x / dx - 0.5, fy0 = center.y / dx - 0.5;
  for (int r = 0; r < kCropSize; ++r) {
    const double v = r - kHalf;
    for (int col = 0; col < kCropSize; ++col) {
      const double u = col - kHalf;
      crop[r * kCropSize + col] = static_cast<float>(
          Bilinear(image, fx0 + c * u - s * v, fy0 + s * u + c * v));
    }
  }
  return crop;
}

Patch ExtractRotatedPatch(const Image& image, Vec2 center, double angle) {
  const std::vector<float> crop = ExtractRotatedCrop(image, center, angle);
  Patch patch;
  patch.source_center = center;
  patch.source_angle = angle;
  for (int r = 0; r < kPatchSize; ++r) {
    for (int c = 0; c < kPatchSize; ++c) {
      const int r2 = 2 * r, c2 = 2 * c;
      const double sum = static_cast<double>(crop[r2 * kCropSize + c2]) +
                         crop[r2 * kCropSize + c2 + 1] +
                         crop[(r2 + 1) * kCropSize + c2] +
                         crop[(r2 + 1) * kCropSize + c2 + 1];
      patch.pixels[r * kPatchSize + c] =
          std::clamp(static_cast<float>(0.25 * sum), 0.0f, 1.0f);
    }
  }
  return patch;
}

}  // namespace advgrasp
