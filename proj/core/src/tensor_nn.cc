// Copyright 2026 The crowdmarl Authors.
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

#include "crowdmarl/tensor_nn.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "crowdmarl/errors.h"
#include "crowdmarl/rng.h"

namespace crowdmarl {
namespace {

void CheckSpec(const MlpSpec& spec) {
  std::vector<std::string> violations;
  if (spec.layer_dims.size() < 2) {
    violations.push_back("mlp needs at least an input and an output dimension");
  }
  for (int d : spec.layer_dims) {
    if (d <= 0) {
      violations.push_back("mlp layer dimensions must be positive");
      break;
    }
  }
  if (spec.use_skip && spec.layer_dims.size() < 4) {
    violations.push_back("skip connection needs at least two hidden layers");
  }
  if (spec.output_activation == OutputActivation::kScaledSigmoid &&
      !(spec.output_scale > 0.0)) {
    violations.push_back("scaled sigmoid needs a positive output scale");
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

}  // namespace

std::size_t Gradients::size() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

std::vector<double> Gradients::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const DenseLayer& l : layers) {
    flat.insert(flat.end(), l.weight.data(), l.weight.data() + l.weight.size());
    flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return flat;
}

void Gradients::SetZero() {
  for (DenseLayer& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  CheckSpec(spec_);
  const int skip = SkipLayer();
  const std::size_t n = spec_.layer_dims.size() - 1;
  layers_.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    int fan_in = spec_.layer_dims[l];
    if (static_cast<int>(l) == skip) fan_in += spec_.layer_dims.front();
    layers_[l].weight = Eigen::MatrixXd::Zero(spec_.layer_dims[l + 1], fan_in);
    layers_[l].bias = Eigen::VectorXd::Zero(spec_.layer_dims[l + 1]);
  }
}

Mlp Mlp::Init(MlpSpec spec, std::uint64_t seed) {
  Mlp mlp(std::move(spec));
  Rng rng(seed);
  for (DenseLayer& layer : mlp.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    // Column-major fill order; fixed so checkpoints are seed-reproducible.
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = rng.Uniform(-bound, bound);
    }
  }
  return mlp;
}

int Mlp::SkipLayer() const {
  if (!spec_.use_skip) return -1;
  return static_cast<int>(spec_.layer_dims.size()) - 3;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

Eigen::MatrixXd Mlp::Activate(const Eigen::MatrixXd& pre) const {
  if (spec_.output_activation == OutputActivation::kIdentity) return pre;
  const double scale = spec_.output_scale;
  return pre.unaryExpr(
      [scale](double z) { return scale / (1.0 + std::exp(-z)); });
}

ForwardCache Mlp::Forward(const Eigen::MatrixXd& input) const {
  if (input.rows() != input_size()) {
    throw ShapeError("Mlp::Forward: expected input of size " +
                     std::to_string(input_size()) + ", got " +
                     std::to_string(input.rows()));
  }
  const int skip = SkipLayer();
  const std::size_t n = layers_.size();
  ForwardCache cache;
  cache.layer_inputs.resize(n);
  cache.pre_activations.resize(n);
  Eigen::MatrixXd current = input;
  for (std::size_t l = 0; l < n; ++l) {
    if (static_cast<int>(l) == skip) {
      Eigen::MatrixXd joined(current.rows() + input.rows(), input.cols());
      joined.topRows(current.rows()) = current;
      joined.bottomRows(input.rows()) = input;
      current = std::move(joined);
    }
    cache.layer_inputs[l] = std::move(current);
    Eigen::MatrixXd pre = layers_[l].weight * cache.layer_inputs[l];
    pre.colwise() += layers_[l].bias;
    if (l + 1 < n) {
      current = pre.cwiseMax(0.0);
    } else {
      cache.output = Activate(pre);
    }
    cache.pre_activations[l] = std::move(pre);
  }
  return cache;
}

Eigen::VectorXd Mlp::Forward(std::span<const double> input) const {
  Eigen::Map<const Eigen::VectorXd> column(input.data(),
                                          static_cast<Eigen::Index>(input.size()));
  return Forward(Eigen::MatrixXd(column)).output.col(0);
}

BackwardResult Mlp::Backward(const ForwardCache& cache,
                             const Eigen::MatrixXd& d_output) const {
  const std::size_t n = layers_.size();
  if (cache.layer_inputs.size() != n || cache.pre_activations.size() != n ||
      cache.output.rows() != output_size() ||
      cache.layer_inputs.front().rows() != input_size()) {
    throw ShapeError("Mlp::Backward: cache does not belong to this network");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (cache.layer_inputs[l].rows() != layers_[l].weight.cols() ||
        cache.pre_activations[l].rows() != layers_[l].weight.rows()) {
      throw ShapeError("Mlp::Backward: cache does not belong to this network");
    }
  }
  if (d_output.rows() != cache.output.rows() ||
      d_output.cols() != cache.output.cols()) {
    throw ShapeError("Mlp::Backward: d_output shape does not match output");
  }
  const int skip = SkipLayer();
  const Eigen::Index batch = d_output.cols();
  const int in = input_size();

  BackwardResult result;
  result.grads.layers.resize(n);
  result.d_input = Eigen::MatrixXd::Zero(in, batch);

  Eigen::MatrixXd delta;
  if (spec_.output_activation == OutputActivation::kIdentity) {
    delta = d_output;
  } else {
    const double scale = spec_.output_scale;
    delta = d_output.cwiseProduct(cache.output.unaryExpr(
        [scale](double y) { return y * (1.0 - y / scale); }));
  }

  for (std::size_t l = n; l-- > 0;) {
    DenseLayer& g = result.grads.layers[l];
    g.weight.noalias() = delta * cache.layer_inputs[l].transpose();
    g.bias = delta.rowwise().sum();
    Eigen::MatrixXd d_layer_input = layers_[l].weight.transpose() * delta;
    if (static_cast<int>(l) == skip) {
      const Eigen::Index hidden = d_layer_input.rows() - in;
      result.d_input += d_layer_input.bottomRows(in);
      d_layer_input = d_layer_input.topRows(hidden).eval();
    }
    if (l == 0) {
      result.d_input += d_layer_input;
    } else {
      const Eigen::MatrixXd& pre = cache.pre_activations[l - 1];
      delta = d_layer_input.cwiseProduct(
          pre.unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; }));
    }
  }
  return result;
}

std::vector<double> Mlp::FlatParameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const DenseLayer& l : layers_) {
    flat.insert(flat.end(), l.weight.data(), l.weight.data() + l.weight.size());
    flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return flat;
}

void Mlp::SetFlatParameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw ShapeError("SetFlatParameters: expected " +
                     std::to_string(parameter_count()) + " values, got " +
                     std::to_string(flat.size()));
  }
  std::size_t offset = 0;
  for (DenseLayer& l : layers_) {
    std::copy_n(flat.begin() + offset, l.weight.size(), l.weight.data());
    offset += l.weight.size();
    std::copy_n(flat.begin() + offset, l.bias.size(), l.bias.data());
    offset += l.bias.size();
  }
}

Gradients Mlp::ZeroGradients() const {
  Gradients g;
  g.layers = layers_;
  g.SetZero();
  return g;
}

bool Mlp::operator==(const Mlp& other) const {
  if (spec_.layer_dims != other.spec_.layer_dims ||
      spec_.output_activation != other.spec_.output_activation ||
      spec_.output_scale != other.spec_.output_scale ||
      spec_.use_skip != other.spec_.use_skip) {
    return false;
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].weight != other.layers_[l].weight ||
        layers_[l].bias != other.layers_[l].bias) {
      return false;
    }
  }
  return true;
}

AdamOptimizer::AdamOptimizer(const Mlp& mlp, AdamConfig config)
    : config_(config), m_(mlp.ZeroGradients()), v_(mlp.ZeroGradients()) {}

void AdamOptimizer::Apply(Mlp& mlp, const Gradients& grads) {
  std::vector<DenseLayer>& params = mlp.mutable_layers();
  if (grads.layers.size() != params.size() ||
      m_.layers.size() != params.size()) {
    throw ShapeError("AdamOptimizer: gradient layer count mismatch");
  }
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (grads.layers[l].weight.rows() != params[l].weight.rows() ||
        grads.layers[l].weight.cols() != params[l].weight.cols() ||
        grads.layers[l].bias.size() != params[l].bias.size() ||
        m_.layers[l].weight.rows() != params[l].weight.rows() ||
        m_.layers[l].weight.cols() != params[l].weight.cols()) {
      throw ShapeError("AdamOptimizer: gradient shape mismatch at layer " +
                       std::to_string(l));
    }
  }
  ++step_count_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    if (lr == 0.0) return;
    param.array() -= lr * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weight, grads.layers[l].weight, m_.layers[l].weight,
           v_.layers[l].weight);
    update(params[l].bias, grads.layers[l].bias, m_.layers[l].bias,
           v_.layers[l].bias);
  }
}

double RelativeError(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckResult GradCheck(const Mlp& mlp, std::span<const double> input,
                          const LossFunctional& loss, double step) {
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
      input.data(), static_cast<Eigen::Index>(input.size()));
  const ForwardCache cache = mlp.Forward(Eigen::MatrixXd(x));
  const Eigen::VectorXd out = cache.output.col(0);
  const BackwardResult analytic =
      mlp.Backward(cache, Eigen::MatrixXd(loss.gradient(out)));

  auto loss_at = [&](const Mlp& net, const Eigen::VectorXd& in) {
    return loss.value(net.Forward(std::span<const double>(in.data(), in.size())));
  };

  GradCheckResult result;
  const std::vector<double> grad_flat = analytic.grads.Flatten();
  std::vector<double> params = mlp.FlatParameters();
  Mlp probe = mlp;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + step;
    probe.SetFlatParameters(params);
    const double plus = loss_at(probe, x);
    params[p] = saved - step;
    probe.SetFlatParameters(params);
    const double minus = loss_at(probe, x);
    params[p] = saved;
    const double numeric = (plus - minus) / (2.0 * step);
    result.max_parameter_error = std::max(
        result.max_parameter_error, RelativeError(grad_flat[p], numeric));
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd shifted = x;
    shifted[i] = x[i] + step;
    const double plus = loss_at(mlp, shifted);
    shifted[i] = x[i] - step;
    const double minus = loss_at(mlp, shifted);
    const double numeric = (plus - minus) / (2.0 * step);
    result.max_input_error = std::max(
        result.max_input_error, RelativeError(analytic.d_input(i, 0), numeric));
  }
  result.max_relative_error =
      std::max(result.max_parameter_error, result.max_input_error);
  return result;
}

}  // namespace crowdmarl
