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

#ifndef CROWDMARL_TENSOR_NN_H_
#define CROWDMARL_TENSOR_NN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace crowdmarl {

enum class OutputActivation { kIdentity, kScaledSigmoid };

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct MlpSpec {
  // input, hidden..., output. At least two entries.
  std::vector<int> layer_dims;
  OutputActivation output_activation = OutputActivation::kIdentity;
  // Upper bound of the scaled sigmoid, i.e. outputs lie in (0, output_scale).
  double output_scale = 1.0;
  // Concatenate the raw input onto the input of the last hidden layer.
  // Needs at least two hidden layers.
  bool use_skip = false;
};

// Parameter-shaped container, also used for gradients and optimizer moments.
struct Gradients {
  std::vector<DenseLayer> layers;

  std::size_t size() const;
  std::vector<double> Flatten() const;
  void SetZero();
};

struct ForwardCache {
  // Input seen by each layer (skip concatenation included).
  std::vector<Eigen::MatrixXd> layer_inputs;
  std::vector<Eigen::MatrixXd> pre_activations;
  Eigen::MatrixXd output;  // out x batch
};

struct BackwardResult {
  Gradients grads;
  Eigen::MatrixXd d_input;  // in x batch
};

// Dense ReLU network. Batched calls take one sample per column.
class Mlp {
 public:
  // All-zero parameters.
  explicit Mlp(MlpSpec spec);

  // Weights uniform in +-1/sqrt(fan_in), zero biases. Deterministic per seed.
  static Mlp Init(MlpSpec spec, std::uint64_t seed);

  const MlpSpec& spec() const { return spec_; }
  int input_size() const { return spec_.layer_dims.front(); }
  int output_size() const { return spec_.layer_dims.back(); }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  ForwardCache Forward(const Eigen::MatrixXd& input) const;
  Eigen::VectorXd Forward(std::span<const double> input) const;
  // Reverse-mode gradients of sum(output .* d_output) with respect to every
  // parameter and to the input.
  BackwardResult Backward(const ForwardCache& cache,
                          const Eigen::MatrixXd& d_output) const;

  std::vector<double> FlatParameters() const;
  void SetFlatParameters(std::span<const double> flat);
  Gradients ZeroGradients() const;

  bool operator==(const Mlp& other) const;

 private:
  // Index of the layer that also receives the raw input, or -1.
  int SkipLayer() const;
  Eigen::MatrixXd Activate(const Eigen::MatrixXd& pre) const;

  MlpSpec spec_;
  std::vector<DenseLayer> layers_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment descent. Apply() minimizes; ascend by negating gradients.
class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& mlp, AdamConfig config);

  void Apply(Mlp& mlp, const Gradients& grads);

  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  std::int64_t step_count() const { return step_count_; }
  const Gradients& first_moment() const { return m_; }
  const Gradients& second_moment() const { return v_; }

 private:
  AdamConfig config_;
  std::int64_t step_count_ = 0;
  Gradients m_;
  Gradients v_;
};

// Scalar loss of a single network output together with its gradient.
struct LossFunctional {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_parameter_error = 0.0;
  double max_input_error = 0.0;
};

// |a - b| / max(|a|, |b|, floor). The floor keeps gradients that are
// numerically zero from dominating the comparison.
double RelativeError(double analytic, double numeric, double floor = 1e-3);

// Compares Backward against central differences for every parameter and
// every input coordinate.
GradCheckResult GradCheck(const Mlp& mlp, std::span<const double> input,
                          const LossFunctional& loss, double step = 1e-5);

}  // namespace crowdmarl

#endif  // CROWDMARL_TENSOR_NN_H_
