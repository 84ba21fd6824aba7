/* Copyright 2026 The interp-asd Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ASD_CORE_NEURALNET_HPP_
#define ASD_CORE_NEURALNET_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace asd {

enum class Activation : std::uint32_t { kNone = 0, kRelu = 1 };

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Fully connected layer: y = act(W x + b), W is out_dim x in_dim.
template <typename T>
struct BasicDenseLayer {
  Mat<T> weights;
  Vec<T> bias;
  Activation activation = Activation::kNone;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
  std::size_t ParameterCount() const {
    return static_cast<std::size_t>(weights.size() + bias.size());
  }
};

// Parallel mean / log-variance projections producing the latent posterior.
template <typename T>
struct BasicVariationalHead {
  BasicDenseLayer<T> mean_layer;
  BasicDenseLayer<T> logvar_layer;

  Eigen::Index latent_dim() const { return mean_layer.out_dim(); }
};

// Encoder layers [0, latent_index), then the optional variational head, then
// decoder layers [latent_index, size). Without a head the encoder output is
// the latent code.
template <typename T>
struct BasicDenseNetwork {
  std::vector<BasicDenseLayer<T>> layers;
  std::size_t latent_index = 0;
  std::optional<BasicVariationalHead<T>> head;

  bool variational() const { return head.has_value(); }
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  std::size_t ParameterCount() const;

  // Throws kDimensionMismatch if consecutive widths do not chain, or
  // kNonFinite if any parameter is NaN/Inf.
  void Validate() const;

  // Every weight and bias buffer, in a fixed order shared by networks of the
  // same topology. Gradients are stored in a network-shaped object so that
  // the two lists line up.
  std::vector<std::span<T>> ParameterSpans();
  std::vector<std::span<const T>> ParameterSpans() const;

  // Same-shaped network with every parameter zero.
  BasicDenseNetwork ZerosLike() const;

  template <typename U>
  BasicDenseNetwork<U> Cast() const;
};

using DenseLayer = BasicDenseLayer<float>;
using VariationalHead = BasicVariationalHead<float>;
using DenseNetwork = BasicDenseNetwork<float>;

// Glorot-uniform weights, zero biases.
template <typename T>
BasicDenseLayer<T> MakeLayer(Eigen::Index in_dim, Eigen::Index out_dim, Activation act,
                             std::mt19937_64& rng);

// Batched activations; each column is one example.
template <typename T>
struct ForwardPass {
  std::vector<Mat<T>> encoder;  // encoder[0] is the input batch
  Mat<T> mean, logvar, noise;   // variational only
  std::vector<Mat<T>> decoder;  // decoder[0] is the latent batch

  const Mat<T>& output() const { return decoder.back(); }
};

// noise, when given, must be latent_dim x batch; the sample is
// z = mean + exp(logvar / 2) * noise. A null noise pointer selects the
// posterior mean (z = mean).
template <typename T>
ForwardPass<T> ForwardBatch(const BasicDenseNetwork<T>& net, const Mat<T>& inputs,
                            const Mat<T>* noise = nullptr);

// Single-example forward pass returning the input followed by every layer's
// output (layers + 1 entries). Variational networks take the posterior-mean
// path and report the mean in place of the head's output.
std::vector<Eigen::VectorXf> Forward(const DenseNetwork& net, const Eigen::VectorXf& x);

// Squared L2 distance (no averaging over dimensions).
double LossMse(std::span<const float> pred, std::span<const float> target);

// 0.5 * sum(mu^2 + exp(logvar) - 1 - logvar): KL(N(mu, exp(logvar)) || N(0, I)).
double KlGaussian(std::span<const float> mu, std::span<const float> logvar);

// Backpropagates d(loss)/d(output) (output_dim x batch) through a recorded
// forward pass. kl_scale multiplies the summed KL term of every example and
// is only used for variational networks (pass kl_weight / batch for a
// batch-mean objective). ReLU uses subgradient 0 at 0.
template <typename T>
BasicDenseNetwork<T> Backward(const BasicDenseNetwork<T>& net, const ForwardPass<T>& pass,
                              const Mat<T>& output_grad, T kl_scale = T(0));

template <typename T>
struct LossAndGrad {
  double loss = 0.0;            // batch mean of recon + kl_weight * kl
  double reconstruction = 0.0;  // batch mean of squared error
  double kl = 0.0;              // batch mean of KL (variational only)
  BasicDenseNetwork<T> grad;
};

// Mean over the batch of ||output - target||^2 (+ kl_weight * KL when the
// network is variational, using the supplied noise).
template <typename T>
LossAndGrad<T> ComputeLossAndGrad(const BasicDenseNetwork<T>& net, const Mat<T>& inputs,
                                  const Mat<T>& targets, double kl_weight,
                                  const Mat<T>* noise);

// Per-example squared error of the posterior-mean forward pass.
Eigen::VectorXd BatchSquaredError(const DenseNetwork& net, const Mat<float>& inputs,
                                  const Mat<float>& targets);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<std::vector<float>> first_moment;
  std::vector<std::vector<float>> second_moment;
  std::int64_t step_count = 0;
};

enum class StepResult { kApplied, kSkippedNonFinite };

// Bias-corrected Adam update. Moments are allocated on the first call. A
// gradient containing NaN/Inf leaves parameters and state untouched.
StepResult AdamStep(std::span<const std::span<float>> params,
                    std::span<const std::span<const float>> grads, AdamState& state);

StepResult AdamStep(DenseNetwork& net, const DenseNetwork& grad, AdamState& state);

}  // namespace asd

#endif  // ASD_CORE_NEURALNET_HPP_
