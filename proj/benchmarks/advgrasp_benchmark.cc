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

#include <vector>

#include "advgrasp/grasp_sim.h"
#include "advgrasp/neural.h"
#include "advgrasp/policy.h"
#include "advgrasp/rng.h"
#include "advgrasp/scene.h"
#include "benchmark/benchmark.h"

namespace advgrasp {
namespace {

Scene BenchScene() {
  return PlaceObject(GenerateObject(11, Difficulty::kMedium), 12);
}

void BM_RenderScene(benchmark::State& state) {
  const Scene scene = BenchScene();
  for (auto _ : state) benchmark::DoNotOptimize(RenderScene(scene));
}
BENCHMARK(BM_RenderScene);

void BM_ExtractRotatedPatch(benchmark::State& state) {
  const Image image = RenderScene(BenchScene());
  double angle = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExtractRotatedPatch(image, {0.2, 0.2}, angle));
    angle += 0.1;
  }
}
BENCHMARK(BM_ExtractRotatedPatch);

void BM_GraspMargin(benchmark::State& state) {
  const Scene scene = BenchScene();
  Rng rng(5);
  std::vector<GraspAction> grasps;
  for (int i = 0; i < 256; ++i) {
    grasps.push_back({scene.pose.x + rng.Uniform(-0.03, 0.03),
                      scene.pose.y + rng.Uniform(-0.03, 0.03),
                      static_cast<int>(rng.Below(kNumAngleBins))});
  }
  const SimConfig config;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        GraspMargin(*scene.object, scene.pose, grasps[i++ % grasps.size()], config));
  }
}
BENCHMARK(BM_GraspMargin);

void BM_Forward(benchmark::State& state) {
  const Network net = InitNetwork(kNumAngleBins, 3);
  const Patch patch = ExtractRotatedPatch(RenderScene(BenchScene()), {0.2, 0.2}, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(Forward(net, patch));
}
BENCHMARK(BM_Forward);

void BM_BackwardFast(benchmark::State& state) {
  const Network net = InitNetwork(kNumAngleBins, 3);
  const Image image = RenderScene(BenchScene());
  Rng rng(9);
  std::vector<TrainingSample> batch(static_cast<std::size_t>(state.range(0)));
  for (TrainingSample& s : batch) {
    s.patch = ExtractRotatedPatch(image, {rng.Uniform(0.15, 0.25), rng.Uniform(0.15, 0.25)}, 0.0);
    s.target_index = static_cast<int>(rng.Below(kNumAngleBins));
    s.target_value = rng.Uniform() < 0.5 ? 0.0 : 1.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(BackwardFast(net, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BackwardFast)->Arg(64);

void BM_ProbabilityMatrix(benchmark::State& state) {
  const Network net = InitNetwork(kNumAngleBins, 3);
  const Image image = RenderScene(BenchScene());
  const std::vector<Vec2> candidates =
      SampleCandidates(image, static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(ProbabilityMatrix(net, image, candidates));
}
BENCHMARK(BM_ProbabilityMatrix)->Arg(128)->Arg(1280);

}  // namespace
}  // namespace advgrasp

BENCHMARK_MAIN();
