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

#ifndef ADVGRASP_SCENE_H_
#define ADVGRASP_SCENE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "advgrasp/geometry.h"

namespace advgrasp {

inline constexpr double kWorkspaceSize = 0.4;  // meters, square
inline constexpr int kImageSize = 256;
inline constexpr double kMetersPerPixel = kWorkspaceSize / kImageSize;
inline constexpr int kCropSize = 64;
inline constexpr int kPatchSize = 32;

enum class Difficulty { kEasy, kMedium, kHard };

std::string_view DifficultyName(Difficulty difficulty);
std::optional<Difficulty> ParseDifficulty(std::string_view name);

// Rigid planar object in its own frame. Vertices are counter-clockwise and
// the frame origin sits at the area centroid, so `com` is (0, 0) up to
// rounding.
struct ObjectShape {
  std::vector<Vec2> vertices;
  double mass = 0.0;         // kg
  double friction_mu = 0.0;  // dimensionless, in (0, 1]
  Vec2 com;
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
  Difficulty difficulty = Difficulty::kEasy;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

// A workspace holding at most one object. An empty scene renders black.
struct Scene {
  std::optional<ObjectShape> object;
  Pose pose;
  std::uint64_t seed = 0;
};

// Row-major grayscale image; row index grows with y, column with x, and
// pixel (r, c) has its center at ((c + 0.5) * dx, (r + 0.5) * dx).
struct Image {
  std::vector<float> pixels =
      std::vector<float>(static_cast<std::size_t>(kImageSize) * kImageSize);
  double meters_per_pixel = kMetersPerPixel;

  float at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * kImageSize + col];
  }
  float& at(int row, int col) {
    return pixels[static_cast<std::size_t>(row) * kImageSize + col];
  }
};

struct Patch {
  std::array<float, kPatchSize * kPatchSize> pixels{};
  Vec2 source_center;
  double source_angle = 0.0;

  float at(int row, int col) const { return pixels[row * kPatchSize + col]; }
};

// Deterministic procedural object. easy: convex 4-6 gon; medium: convex hull
// with a single notch; hard: L or T shaped union of two rectangles.
ObjectShape GenerateObject(std::uint64_t seed, Difficulty difficulty);

// Places `object` at a pose drawn from `seed` so that it lies fully inside
// the workspace.
Scene PlaceObject(const ObjectShape& object, std::uint64_t seed);
Scene EmptyScene(std::uint64_t seed = 0);

std::vector<Vec2> WorldVertices(const ObjectShape& object, const Pose& pose);
Vec2 WorldCom(const ObjectShape& object, const Pose& pose);

// Binary pixel-center rasterization with a per-object hash texture in
// [0.2, 0.8]; background is exactly 0.
Image RenderScene(const Scene& scene);

// 64x64 bilinear crop centred on `center` with its axes rotated by `angle`
// (so image content appears rotated by -angle), 2x2 mean pooled to 32x32.
// Samples that fall outside the image read as 0.
Patch ExtractRotatedPatch(const Image& image, Vec2 center, double angle);

// Unpooled 64x64 crop; exposed for tests and diagnostics.
std::vector<float> ExtractRotatedCrop(const Image& image, Vec2 center,
                                      double angle);

}  // namespace advgrasp

#endif  // ADVGRASP_SCENE_H_
