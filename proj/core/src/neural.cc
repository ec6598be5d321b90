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

#include "advgrasp/neural.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "advgrasp/parallel.h"
#include "advgrasp/rng.h"

namespace advgrasp {

// ----- Architecture -----

Architecture Architecture::Default(int n_outputs) {
  Architecture arch;
  arch.layers = {
      {LayerKind::kConv, 8, 5, 2},   {LayerKind::kRelu, 0, 0, 1},
      {LayerKind::kConv, 16, 3, 2},  {LayerKind::kRelu, 0, 0, 1},
      {LayerKind::kDense, 128, 0, 1}, {LayerKind::kRelu, 0, 0, 1},
      {LayerKind::kDense, n_outputs, 0, 1},
  };
  return arch;
}

Architecture Architecture::SingleDense(int n_outputs) {
  Architecture arch;
  arch.layers = {{LayerKind::kDense, n_outputs, 0, 1}};
  return arch;
}

int Architecture::n_outputs() const {
  if (layers.empty() || layers.back().kind != LayerKind::kDense) return 0;
  return layers.back().units;
}

std::string Architecture::Describe() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out << ' ';
    const LayerSpec& l = layers[i];
    switch (l.kind) {
      case LayerKind::kConv:
        out << "conv:" << l.units << ':' << l.kernel << ':' << l.stride;
        break;
      case LayerKind::kDense:
        out << "dense:" << l.units;
        break;
      case LayerKind::kRelu:
        out << "relu";
        break;
    }
  }
  return out.str();
}

Architecture Architecture::Parse(const std::string& text) {
  Architecture arch;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    LayerSpec spec;
    if (token == "relu") {
      spec.kind = LayerKind::kRelu;
    } else if (token.rfind("dense:", 0) == 0) {
      spec.kind = LayerKind::kDense;
      spec.units = std::stoi(token.substr(6));
    } else if (token.rfind("conv:", 0) == 0) {
      spec.kind = LayerKind::kConv;
      char sep1 = 0, sep2 = 0;
      std::istringstream fields(token.substr(5));
      fields >> spec.units >> sep1 >> spec.kernel >> sep2 >> spec.stride;
      if (!fields || sep1 != ':' || sep2 != ':') {
        throw std::invalid_argument("bad conv layer '" + token + "'");
      }
    } else {
      throw std::invalid_argument("unknown layer '" + token + "'");
    }
    arch.layers.push_back(spec);
  }
  return arch;
}

// ----- Layer plan -----

namespace {

struct LayerPlan {
  LayerSpec spec;
  Shape3 in;
  Shape3 out;
  int weight = -1;  // tensor index
  int bias = -1;
};

std::vector<LayerPlan> MakePlan(const Architecture& arch) {
  if (arch.n_outputs() <= 0) {
    throw std::invalid_argument("architecture must end in a dense layer");
  }
  std::vector<LayerPlan> plan;
  Shape3 shape = arch.input;
  int tensor = 0;
  for (const LayerSpec& spec : arch.layers) {
    LayerPlan p;
    p.spec = spec;
    p.in = shape;
    switch (spec.kind) {
      case LayerKind::kConv: {
        if (spec.kernel <= 0 || spec.stride <= 0 || spec.units <= 0 ||
            spec.kernel > shape.height || spec.kernel > shape.width) {
          throw std::invalid_argument("conv layer does not fit its input");
        }
        p.out = {spec.units, (shape.height - spec.kernel) / spec.stride + 1,
                 (shape.width - spec.kernel) / spec.stride + 1};
        p.weight = tensor++;
        p.bias = tensor++;
        break;
      }
      case LayerKind::kDense:
        if (spec.units <= 0) throw std::invalid_argument("empty dense layer");
        p.out = {spec.units, 1, 1};
        p.weight = tensor++;
        p.bias = tensor++;
        break;
      case LayerKind::kRelu:
        p.out = shape;
        break;
    }
    shape = p.out;
    plan.push_back(p);
  }
  return plan;
}

std::vector<int> WeightShape(const LayerPlan& p) {
  if (p.spec.kind == LayerKind::kConv) {
    return {p.spec.units, p.in.channels, p.spec.kernel, p.spec.kernel};
  }
  return {p.spec.units, p.in.size()};
}

// Read-only parameter tensors in the working precision.
template <typename T>
struct ParamView {
  std::vector<std::span<const T>> tensors;
};

ParamView<float> ViewOf(const Network& net) {
  ParamView<float> view;
  for (const Tensor& t : net.params()) view.tensors.emplace_back(t.values);
  return view;
}

template <typename T>
using Buffers = std::vector<std::vector<T>>;

template <typename T>
Buffers<T> ZeroLike(const Network& net) {
  Buffers<T> out;
  for (const Tensor& t : net.params()) out.emplace_back(t.values.size(), T(0));
  return out;
}

// Fixed-order blocked dot product; the eight partial sums let the compiler
// vectorise without reassociating across calls.
template <typename T>
T Dot(const T* a, const T* b, int n) {
  T acc[8] = {};
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int k = 0; k < 8; ++k) acc[k] += a[i + k] * b[i + k];
  }
  T tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

// Unrolls the receptive field of every output position of a conv layer into
// rows ordered like the weights: [position][channel][ky][kx].
template <typename T>
void Im2Col(const LayerPlan& p, const std::vector<T>& in, std::vector<T>& cols) {
  const int k = p.spec.kernel, s = p.spec.stride;
  const int ih = p.in.height, iw = p.in.width, ic = p.in.channels;
  const int row = ic * k * k;
  cols.resize(static_cast<std::size_t>(p.out.height) * p.out.width * row);
  T* dst = cols.data();
  for (int y = 0; y < p.out.height; ++y) {
    for (int x = 0; x < p.out.width; ++x) {
      for (int c = 0; c < ic; ++c) {
        const T* src = &in[static_cast<std::size_t>((c * ih + y * s) * iw + x * s)];
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) *dst++ = src[ky * iw + kx];
        }
      }
    }
  }
}

// acts[0] is the input, acts[i + 1] the output of layer i.
template <typename T>
void RunForward(const std::vector<LayerPlan>& plan, const ParamView<T>& params,
                const Patch& patch, Buffers<T>& acts) {
  acts.resize(plan.size() + 1);
  acts[0].assign(patch.pixels.begin(), patch.pixels.end());
  std::vector<T> cols;
  for (std::size_t li = 0; li < plan.size(); ++li) {
    const LayerPlan& p = plan[li];
    const std::vector<T>& in = acts[li];
    std::vector<T>& out = acts[li + 1];
    out.assign(static_cast<std::size_t>(p.out.size()), T(0));
    switch (p.spec.kind) {
      case LayerKind::kConv: {
        const std::span<const T> w = params.tensors[p.weight];
        const std::span<const T> b = params.tensors[p.bias];
        const int row = p.in.channels * p.spec.kernel * p.spec.kernel;
        const int positions = p.out.height * p.out.width;
        Im2Col(p, in, cols);
        for (int o = 0; o < p.out.channels; ++o) {
          const T* wo = &w[static_cast<std::size_t>(o) * row];
          for (int q = 0; q < positions; ++q) {
            out[static_cast<std::size_t>(o) * positions + q] =
                b[o] + Dot(wo, &cols[static_cast<std::size_t>(q) * row], row);
          }
        }
        break;
      }
      case LayerKind::kDense: {
        const std::span<const T> w = params.tensors[p.weight];
        const std::span<const T> b = params.tensors[p.bias];
        const int n_in = p.in.size();
        for (int j = 0; j < p.out.channels; ++j) {
          out[j] = Dot(&w[static_cast<std::size_t>(j) * n_in], in.data(), n_in) + b[j];
        }
        break;
      }
      case LayerKind::kRelu:
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::max(in[i], T(0));
        break;
    }
  }
}

// Accumulates parameter gradients given d(loss)/d(output of the last layer).
template <typename T>
void RunBackward(const std::vector<LayerPlan>& plan, const ParamView<T>& params,
                 const Buffers<T>& acts, std::vector<T> grad_out,
                 Buffers<T>& grads) {
  std::vector<T> grad_in, cols, grad_cols;
  for (std::size_t li = plan.size(); li-- > 0;) {
    const LayerPlan& p = plan[li];
    const std::vector<T>& in = acts[li];
    const bool need_input_grad = li > 0;
    grad_in.assign(need_input_grad ? in.size() : 0, T(0));
    switch (p.spec.kind) {
      case LayerKind::kConv: {
        const std::span<const T> w = params.tensors[p.weight];
        std::vector<T>& gw = grads[p.weight];
        std::vector<T>& gb = grads[p.bias];
        const int k = p.spec.kernel, s = p.spec.stride;
        const int ih = p.in.height, iw = p.in.width, ic = p.in.channels;
        const int row = ic * k * k;
        const int positions = p.out.height * p.out.width;
        Im2Col(p, in, cols);
        if (need_input_grad) grad_cols.assign(cols.size(), T(0));
        for (int o = 0; o < p.out.channels; ++o) {
          T* gwo = &gw[static_cast<std::size_t>(o) * row];
          const T* wo = &w[static_cast<std::size_t>(o) * row];
          for (int q = 0; q < positions; ++q) {
            const T g = grad_out[static_cast<std::size_t>(o) * positions + q];
            if (g == T(0)) continue;
            gb[o] += g;
            const T* col = &cols[static_cast<std::size_t>(q) * row];
            for (int i = 0; i < row; ++i) gwo[i] += g * col[i];
            if (need_input_grad) {
              T* gcol = &grad_cols[static_cast<std::size_t>(q) * row];
              for (int i = 0; i < row; ++i) gcol[i] += g * wo[i];
            }
          }
        }
        if (need_input_grad) {
          const T* src = grad_cols.data();
          for (int y = 0; y < p.out.height; ++y) {
            for (int x = 0; x < p.out.width; ++x) {
              for (int c = 0; c < ic; ++c) {
                T* dst = &grad_in[static_cast<std::size_t>((c * ih + y * s) * iw + x * s)];
                for (int ky = 0; ky < k; ++ky) {
                  for (int kx = 0; kx < k; ++kx) dst[ky * iw + kx] += *src++;
                }
              }
            }
          }
        }
        break;
      }
      case LayerKind::kDense: {
        const std::span<const T> w = params.tensors[p.weight];
        std::vector<T>& gw = grads[p.weight];
        std::vector<T>& gb = grads[p.bias];
        const int n_in = p.in.size();
        for (int j = 0; j < p.out.channels; ++j) {
          const T g = grad_out[j];
          if (g == T(0)) continue;
          gb[j] += g;
          T* grow = &gw[static_cast<std::size_t>(j) * n_in];
          const T* row = &w[static_cast<std::size_t>(j) * n_in];
          for (int i = 0; i < n_in; ++i) grow[i] += g * in[i];
          if (need_input_grad) {
            for (int i = 0; i < n_in; ++i) grad_in[i] += g * row[i];
          }
        }
        break;
      }
      case LayerKind::kRelu:
        if (need_input_grad) {
          for (std::size_t i = 0; i < in.size(); ++i) {
            grad_in[i] = in[i] > T(0) ? grad_out[i] : T(0);
          }
        }
        break;
    }
    grad_out.swap(grad_in);
  }
}

void CheckSample(const Network& net, const TrainingSample& s) {
  if (s.target_index < 0 || s.target_index >= net.n_outputs()) {
    throw std::invalid_argument("target_index out of range");
  }
}

// Fixed chunking keeps the floating point summation order independent of
// the number of worker threads.
constexpr int kGradientChunks = 8;

template <typename T>
Gradients BatchGradients(const Network& net, const ParamView<T>& params,
                         std::span<const TrainingSample> batch,
                         std::vector<double>* predictions) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  for (const TrainingSample& s : batch) CheckSample(net, s);
  const std::vector<LayerPlan> plan = MakePlan(net.arch());
  const int n = static_cast<int>(batch.size());
  const int chunks = std::min(kGradientChunks, n);
  std::vector<Buffers<T>> partial(chunks);
  std::vector<double> losses(batch.size());
  std::vector<double> preds(batch.size());
  const T scale = T(1) / static_cast<T>(n);

  ParallelFor(chunks, [&](int chunk) {
    Buffers<T>& grads = partial[chunk];
    grads = ZeroLike<T>(net);
    Buffers<T> acts;
    const int begin = chunk * n / chunks, end = (chunk + 1) * n / chunks;
    for (int i = begin; i < end; ++i) {
      const TrainingSample& s = batch[i];
      RunForward(plan, params, s.patch, acts);
      const double logit = static_cast<double>(acts.back()[s.target_index]);
      losses[i] = BceFromLogit(logit, s.target_value);
      preds[i] = Sigmoid(logit);
      std::vector<T> grad_out(acts.back().size(), T(0));
      grad_out[s.target_index] =
          static_cast<T>(preds[i] - s.target_value) * scale;
      RunBackward(plan, params, acts, std::move(grad_out), grads);
    }
  });

  Gradients out;
  out.tensors.resize(net.params().size());
  for (std::size_t t = 0; t < out.tensors.size(); ++t) {
    std::vector<double>& dst = out.tensors[t];
    dst.assign(net.params()[t].values.size(), 0.0);
    for (int chunk = 0; chunk < chunks; ++chunk) {
      const std::vector<T>& src = partial[chunk][t];
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
  double loss = 0.0;
  for (double l : losses) loss += l;
  out.loss = loss / n;
  if (predictions) *predictions = std::move(preds);
  return out;
}

struct DoubleParams {
  std::vector<std::vector<double>> storage;
  ParamView<double> view;
};

DoubleParams ToDouble(const Network& net) {
  DoubleParams d;
  for (const Tensor& t : net.params()) {
    d.storage.emplace_back(t.values.begin(), t.values.end());
  }
  for (const auto& s : d.storage) d.view.tensors.emplace_back(s);
  return d;
}

// Loss and the sign pattern of every ReLU input, used to detect kinks.
double LossWithPattern(const std::vector<LayerPlan>& plan,
                       const ParamView<double>& params,
                       std::span<const TrainingSample> batch,
                       std::vector<bool>* pattern) {
  Buffers<double> acts;
  double loss = 0.0;
  if (pattern) pattern->clear();
  for (const TrainingSample& s : batch) {
    RunForward(plan, params, s.patch, acts);
    loss += BceFromLogit(acts.back()[s.target_index], s.target_value);
    if (!pattern) continue;
    for (std::size_t li = 0; li < plan.size(); ++li) {
      if (plan[li].spec.kind != LayerKind::kRelu) continue;
      for (double v : acts[li]) pattern->push_back(v > 0.0);
    }
  }
  return loss / static_cast<double>(batch.size());
}

}  // namespace

// ----- Network -----

Network::Network(Architecture arch, std::uint64_t seed, std::vector<Tensor> params)
    : arch_(std::move(arch)), seed_(seed), params_(std::move(params)) {
  const std::vector<LayerPlan> plan = MakePlan(arch_);
  std::size_t expected = 0;
  for (const LayerPlan& p : plan) {
    if (p.weight < 0) continue;
    expected += 2;
    if (params_.size() < expected) break;
    std::size_t w_size = 1;
    for (int d : WeightShape(p)) w_size *= static_cast<std::size_t>(d);
    if (params_[p.weight].values.size() != w_size ||
        params_[p.bias].values.size() != static_cast<std::size_t>(p.spec.units)) {
      throw std::invalid_argument("parameter tensor size mismatch");
    }
  }
  if (params_.size() != expected) {
    throw std::invalid_argument("parameter tensor count mismatch");
  }
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& t : params_) n += t.values.size();
  return n;
}

Network InitNetwork(const Architecture& arch, std::uint64_t seed) {
  const std::vector<LayerPlan> plan = MakePlan(arch);
  Rng rng(DeriveSeed(seed, {0x1417}));
  std::vector<Tensor> params;
  for (std::size_t li = 0; li < plan.size(); ++li) {
    const LayerPlan& p = plan[li];
    if (p.weight < 0) continue;
    Tensor w;
    w.name = "layer" + std::to_string(li) + ".weight";
    w.shape = WeightShape(p);
    std::size_t size = 1;
    for (int d : w.shape) size *= static_cast<std::size_t>(d);
    double fan_in, fan_out;
    if (p.spec.kind == LayerKind::kConv) {
      const int area = p.spec.kernel * p.spec.kernel;
      fan_in = p.in.channels * area;
      fan_out = p.spec.units * area;
    } else {
      fan_in = p.in.size();
      fan_out = p.spec.units;
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    w.values.resize(size);
    for (float& v : w.values) v = static_cast<float>(rng.Uniform(-limit, limit));
    Tensor b;
    b.name = "layer" + std::to_string(li) + ".bias";
    b.shape = {p.spec.units};
    b.values.assign(static_cast<std::size_t>(p.spec.units), 0.0f);
    params.push_back(std::move(w));
    params.push_back(std::move(b));
  }
  return Network(arch, seed, std::move(params));
}

Network InitNetwork(int n_outputs, std::uint64_t seed) {
  if (n_outputs != 15 && n_outputs != 18 && n_outputs != 36) {
    throw std::invalid_argument("n_outputs must be 15, 18 or 36");
  }
  return InitNetwork(Architecture::Default(n_outputs), seed);
}

void ZeroNetwork(Network& net) {
  for (Tensor& t : net.mutable_params()) {
    std::fill(t.values.begin(), t.values.end(), 0.0f);
  }
}

// ----- Forward and loss -----

std::vector<double> ForwardLogits(const Network& net, const Patch& patch) {
  const std::vector<LayerPlan> plan = MakePlan(net.arch());
  Buffers<float> acts;
  RunForward(plan, ViewOf(net), patch, acts);
  return {acts.back().begin(), acts.back().end()};
}

std::vector<double> Forward(const Network& net, const Patch& patch) {
  std::vector<double> out = ForwardLogits(net, patch);
  for (double& v : out) v = Sigmoid(v);
  return out;
}

double Sigmoid(double logit) {
  if (logit >= 0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

double BceLoss(double pred, double target) {
  if (!(pred > 0.0 && pred < 1.0)) {
    throw std::invalid_argument("prediction must lie in (0, 1)");
  }
  return -(target * std::log(pred) + (1.0 - target) * std::log1p(-pred));
}

double BceFromLogit(double logit, double target) {
  // softplus(z) - t * z
  return std::max(logit, 0.0) - target * logit + std::log1p(std::exp(-std::abs(logit)));
}

// ----- Gradients -----

Gradients Backward(const Network& net, std::span<const TrainingSample> batch) {
  const DoubleParams d = ToDouble(net);
  return BatchGradients<double>(net, d.view, batch, nullptr);
}

Gradients BackwardFast(const Network& net, std::span<const TrainingSample> batch,
                       std::vector<double>* predictions) {
  return BatchGradients<float>(net, ViewOf(net), batch, predictions);
}

double BatchLoss(const Network& net, std::span<const TrainingSample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const DoubleParams d = ToDouble(net);
  return LossWithPattern(MakePlan(net.arch()), d.view, batch, nullptr);
}

OptState InitOptState(const Network& net) {
  OptState opt;
  for (const Tensor& t : net.params()) opt.cache.emplace_back(t.values.size(), 0.0);
  return opt;
}

void RmsPropStep(Network& net, const Gradients& grads, OptState& opt) {
  std::vector<Tensor>& params = net.mutable_params();
  if (opt.cache.empty()) opt.cache = InitOptState(net).cache;
  if (grads.tensors.size() != params.size() || opt.cache.size() != params.size()) {
    throw std::invalid_argument("gradient / optimizer shape mismatch");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    std::vector<float>& w = params[t].values;
    const std::vector<double>& g = grads.tensors[t];
    std::vector<double>& cache = opt.cache[t];
    if (g.size() != w.size() || cache.size() != w.size()) {
      throw std::invalid_argument("gradient / optimizer shape mismatch");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      cache[i] = opt.decay * cache[i] + (1.0 - opt.decay) * g[i] * g[i];
      w[i] = static_cast<float>(static_cast<double>(w[i]) -
                                opt.learning_rate * g[i] /
                                    (std::sqrt(cache[i]) + opt.epsilon));
    }
  }
}

GradCheckResult GradCheck(const Network& net,
                          std::span<const TrainingSample> batch,
                          std::uint64_t seed, int max_coordinates,
                          const std::function<void(Gradients&)>& mutate) {
  constexpr double kStep = 1e-4;
  Gradients analytic = Backward(net, batch);
  if (mutate) mutate(analytic);

  const std::vector<LayerPlan> plan = MakePlan(net.arch());
  DoubleParams d = ToDouble(net);
  std::vector<bool> base_pattern, plus_pattern, minus_pattern;
  LossWithPattern(plan, d.view, batch, &base_pattern);

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t t = 0; t < d.storage.size(); ++t) {
    for (std::size_t i = 0; i < d.storage[t].size(); ++i) coords.emplace_back(t, i);
  }
  Rng rng(DeriveSeed(seed, {0x6c}));
  // Partial Fisher-Yates: the first max_coordinates entries become a sample.
  const std::size_t want =
      std::min(coords.size(), static_cast<std::size_t>(std::max(max_coordinates, 0)));

  GradCheckResult result;
  std::size_t next = 0;
  while (result.coordinates_checked < static_cast<int>(want) && next < coords.size()) {
    const std::size_t j = next + rng.Below(coords.size() - next);
    std::swap(coords[next], coords[j]);
    const auto [t, i] = coords[next++];
    double& w = d.storage[t][i];
    const double original = w;
    w = original + kStep;
    const double plus = LossWithPattern(plan, d.view, batch, &plus_pattern);
    w = original - kStep;
    const double minus = LossWithPattern(plan, d.view, batch, &minus_pattern);
    w = original;
    if (plus_pattern != base_pattern || minus_pattern != base_pattern) {
      ++result.coordinates_skipped;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * kStep);
    const double a = analytic.tensors[t][i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(a - numeric) / denom);
    ++result.coordinates_checked;
  }
  return result;
}

}  // namespace advgrasp
