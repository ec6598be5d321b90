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

#ifndef ADVGRASP_NEURAL_H_
#define ADVGRASP_NEURAL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "advgrasp/scene.h"

namespace advgrasp {

enum class LayerKind { kConv, kDense, kRelu };

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int units = 0;   // output channels (conv) or output width (dense)
  int kernel = 0;  // conv only
  int stride = 1;  // conv only

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Shape3 {
  int channels = 1;
  int height = 1;
  int width = 1;

  int size() const { return channels * height * width; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

// Layer stack applied to a 32x32x1 patch. The last layer must be dense; a
// sigmoid is applied to its outputs. Conv layers use valid padding.
struct Architecture {
  Shape3 input{1, kPatchSize, kPatchSize};
  std::vector<LayerSpec> layers;

  // conv 8@5x5/2, relu, conv 16@3x3/2, relu, dense 128, relu, dense n.
  static Architecture Default(int n_outputs);
  // A single dense layer straight to the outputs.
  static Architecture SingleDense(int n_outputs);

  int n_outputs() const;
  // Compact text form, e.g. "conv:8:5:2 relu dense:18".
  std::string Describe() const;
  static Architecture Parse(const std::string& text);

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<float> values;
};

// Weights of a sigmoid-headed network (one per player).
class Network {
 public:
  Network() = default;
  Network(Architecture arch, std::uint64_t seed, std::vector<Tensor> params);

  const Architecture& arch() const { return arch_; }
  int n_outputs() const { return arch_.n_outputs(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Tensor>& params() const { return params_; }
  std::vector<Tensor>& mutable_params() { return params_; }
  std::size_t parameter_count() const;

 private:
  Architecture arch_;
  std::uint64_t seed_ = 0;
  std::vector<Tensor> params_;
};

// Glorot-uniform weights, zero biases. n_outputs must be 15, 18 or 36.
Network InitNetwork(int n_outputs, std::uint64_t seed);
Network InitNetwork(const Architecture& arch, std::uint64_t seed);

// Zeroes every weight and bias.
void ZeroNetwork(Network& net);

std::vector<double> ForwardLogits(const Network& net, const Patch& patch);
// Sigmoid probabilities, strictly inside (0, 1) for finite logits.
std::vector<double> Forward(const Network& net, const Patch& patch);

double Sigmoid(double logit);
double BceLoss(double pred, double target);
// Same loss evaluated from the logit without forming log(pred).
double BceFromLogit(double logit, double target);

// One supervised output per sample; the other outputs are masked out.
struct TrainingSample {
  Patch patch;
  int target_index = 0;
  double target_value = 0.0;
};

struct Gradients {
  std::vector<std::vector<double>> tensors;  // same order and sizes as params
  double loss = 0.0;                         // masked mean BCE over the batch
};

// Exact gradient of the masked mean BCE, evaluated in double precision.
Gradients Backward(const Network& net, std::span<const TrainingSample> batch);

// Single precision variant used by the training loop; also returns the
// pre-update predictions at each sample's target index.
Gradients BackwardFast(const Network& net, std::span<const TrainingSample> batch,
                       std::vector<double>* predictions = nullptr);

// Mean masked BCE in double precision.
double BatchLoss(const Network& net, std::span<const TrainingSample> batch);

struct OptState {
  std::vector<std::vector<double>> cache;
  double learning_rate = 1e-3;
  double decay = 0.9;
  double epsilon = 1e-8;
  int batch_size = 64;
};

OptState InitOptState(const Network& net);
// cache = decay * cache + (1 - decay) * g^2;  w -= lr * g / (sqrt(cache) + eps)
void RmsPropStep(Network& net, const Gradients& grads, OptState& opt);

struct GradCheckResult {
  double max_relative_error = 0.0;
  int coordinates_checked = 0;
  int coordinates_skipped = 0;  // perturbation crossed a ReLU kink
};

// Compares Backward against central differences (step 1e-4, double
// precision) on up to `max_coordinates` random parameter coordinates.
// `mutate` may alter the analytic gradient before comparison.
GradCheckResult GradCheck(const Network& net,
                          std::span<const TrainingSample> batch,
                          std::uint64_t seed, int max_coordinates = 100,
                          const std::function<void(Gradients&)>& mutate = {});

}  // namespace advgrasp

#endif  // ADVGRASP_NEURAL_H_
