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

#include "core/neuralnet.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace asd {
namespace {

template <typename T>
void ApplyActivation(Mat<T>& z, Activation act) {
  if (act == Activation::kRelu) z = z.cwiseMax(T(0));
}

template <typename T>
Mat<T> Affine(const BasicDenseLayer<T>& layer, const Mat<T>& in) {
  Mat<T> z = layer.weights * in;
  z.colwise() += layer.bias;
  ApplyActivation(z, layer.activation);
  return z;
}

// Propagates grad (w.r.t. the layer output) back through one layer, filling
// the layer's parameter gradients and returning the gradient w.r.t. its input.
template <typename T>
Mat<T> LayerBackward(const BasicDenseLayer<T>& layer, const Mat<T>& in, const Mat<T>& out,
                     Mat<T> grad, BasicDenseLayer<T>& layer_grad) {
  if (layer.activation == Activation::kRelu) {
    grad.array() *= (out.array() > T(0)).template cast<T>();
  }
  layer_grad.weights.noalias() = grad * in.transpose();
  layer_grad.bias = grad.rowwise().sum();
  return layer.weights.transpose() * grad;
}

template <typename T>
void CheckLayer(const BasicDenseLayer<T>& layer, const std::string& where) {
  Require(layer.bias.size() == layer.out_dim(), ErrorCode::kDimensionMismatch,
          where + ": bias length does not match output width");
  Require(layer.weights.allFinite() && layer.bias.allFinite(), ErrorCode::kNonFinite,
          where + ": non-finite parameter");
}

template <typename T, typename U>
BasicDenseLayer<U> CastLayer(const BasicDenseLayer<T>& layer) {
  return {layer.weights.template cast<U>(), layer.bias.template cast<U>(), layer.activation};
}

template <typename T>
BasicDenseLayer<T> ZeroLayer(const BasicDenseLayer<T>& layer) {
  return {Mat<T>::Zero(layer.weights.rows(), layer.weights.cols()),
          Vec<T>::Zero(layer.bias.size()), layer.activation};
}

}  // namespace

template <typename T>
Eigen::Index BasicDenseNetwork<T>::input_dim() const {
  if (!layers.empty() && latent_index > 0) return layers.front().in_dim();
  if (head) return head->mean_layer.in_dim();
  return layers.empty() ? 0 : layers.front().in_dim();
}

template <typename T>
Eigen::Index BasicDenseNetwork<T>::output_dim() const {
  if (latent_index < layers.size()) return layers.back().out_dim();
  if (head) return head->latent_dim();
  return layers.empty() ? 0 : layers.back().out_dim();
}

template <typename T>
std::size_t BasicDenseNetwork<T>::ParameterCount() const {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.ParameterCount();
  if (head) total += head->mean_layer.ParameterCount() + head->logvar_layer.ParameterCount();
  return total;
}

template <typename T>
void BasicDenseNetwork<T>::Validate() const {
  Require(!layers.empty() || head, ErrorCode::kInvalidArgument, "network has no layers");
  Require(latent_index <= layers.size(), ErrorCode::kInvalidArgument,
          "latent index past the last layer");
  Eigen::Index width = input_dim();
  for (std::size_t i = 0; i <= layers.size(); ++i) {
    if (i == latent_index && head) {
      CheckLayer(head->mean_layer, "mean head");
      CheckLayer(head->logvar_layer, "logvar head");
      Require(head->mean_layer.in_dim() == width && head->logvar_layer.in_dim() == width,
              ErrorCode::kDimensionMismatch, "variational head input width mismatch");
      Require(head->mean_layer.out_dim() == head->logvar_layer.out_dim(),
              ErrorCode::kDimensionMismatch, "mean and logvar widths differ");
      width = head->latent_dim();
    }
    if (i == layers.size()) break;
    const std::string where = "layer " + std::to_string(i);
    CheckLayer(layers[i], where);
    Require(layers[i].in_dim() == width, ErrorCode::kDimensionMismatch,
            where + ": expects " + std::to_string(layers[i].in_dim()) + " inputs, previous width " +
                std::to_string(width));
    width = layers[i].out_dim();
  }
}

template <typename T>
std::vector<std::span<T>> BasicDenseNetwork<T>::ParameterSpans() {
  std::vector<std::span<T>> out;
  auto add = [&](BasicDenseLayer<T>& l) {
    out.emplace_back(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  };
  for (auto& l : layers) add(l);
  if (head) {
    add(head->mean_layer);
    add(head->logvar_layer);
  }
  return out;
}

template <typename T>
std::vector<std::span<const T>> BasicDenseNetwork<T>::ParameterSpans() const {
  auto spans = const_cast<BasicDenseNetwork*>(this)->ParameterSpans();
  return {spans.begin(), spans.end()};
}

template <typename T>
BasicDenseNetwork<T> BasicDenseNetwork<T>::ZerosLike() const {
  BasicDenseNetwork<T> out;
  out.latent_index = latent_index;
  for (const auto& l : layers) out.layers.push_back(ZeroLayer(l));
  if (head) out.head = BasicVariationalHead<T>{ZeroLayer(head->mean_layer), ZeroLayer(head->logvar_layer)};
  return out;
}

template <typename T>
template <typename U>
BasicDenseNetwork<U> BasicDenseNetwork<T>::Cast() const {
  BasicDenseNetwork<U> out;
  out.latent_index = latent_index;
  for (const auto& l : layers) out.layers.push_back(CastLayer<T, U>(l));
  if (head) {
    out.head = BasicVariationalHead<U>{CastLayer<T, U>(head->mean_layer),
                                       CastLayer<T, U>(head->logvar_layer)};
  }
  return out;
}

template <typename T>
BasicDenseLayer<T> MakeLayer(Eigen::Index in_dim, Eigen::Index out_dim, Activation act,
                             std::mt19937_64& rng) {
  Require(in_dim > 0 && out_dim > 0, ErrorCode::kInvalidArgument, "layer widths must be positive");
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  std::uniform_real_distribution<double> dist(-limit, limit);
  BasicDenseLayer<T> layer;
  layer.weights.resize(out_dim, in_dim);
  // Row-major fill order so the draw sequence matches the checkpoint layout.
  for (Eigen::Index r = 0; r < out_dim; ++r) {
    for (Eigen::Index c = 0; c < in_dim; ++c) layer.weights(r, c) = static_cast<T>(dist(rng));
  }
  layer.bias = Vec<T>::Zero(out_dim);
  layer.activation = act;
  return layer;
}

template <typename T>
ForwardPass<T> ForwardBatch(const BasicDenseNetwork<T>& net, const Mat<T>& inputs,
                            const Mat<T>* noise) {
  Require(inputs.rows() == net.input_dim(), ErrorCode::kDimensionMismatch,
          "input has " + std::to_string(inputs.rows()) + " dims, network expects " +
              std::to_string(net.input_dim()));
  ForwardPass<T> pass;
  pass.encoder.reserve(net.latent_index + 1);
  pass.encoder.push_back(inputs);
  for (std::size_t i = 0; i < net.latent_index; ++i) {
    pass.encoder.push_back(Affine(net.layers[i], pass.encoder.back()));
  }

  Mat<T> latent;
  if (net.head) {
    pass.mean = Affine(net.head->mean_layer, pass.encoder.back());
    pass.logvar = Affine(net.head->logvar_layer, pass.encoder.back());
    if (noise) {
      Require(noise->rows() == pass.mean.rows() && noise->cols() == pass.mean.cols(),
              ErrorCode::kDimensionMismatch, "noise shape does not match the latent batch");
      pass.noise = *noise;
      latent = pass.mean + ((pass.logvar.array() * T(0.5)).exp() * noise->array()).matrix();
    } else {
      pass.noise = Mat<T>::Zero(pass.mean.rows(), pass.mean.cols());
      latent = pass.mean;
    }
  } else {
    latent = pass.encoder.back();
  }

  pass.decoder.reserve(net.layers.size() - net.latent_index + 1);
  pass.decoder.push_back(std::move(latent));
  for (std::size_t i = net.latent_index; i < net.layers.size(); ++i) {
    pass.decoder.push_back(Affine(net.layers[i], pass.decoder.back()));
  }
  return pass;
}

std::vector<Eigen::VectorXf> Forward(const DenseNetwork& net, const Eigen::VectorXf& x) {
  const ForwardPass<float> pass = ForwardBatch<float>(net, x);
  std::vector<Eigen::VectorXf> out;
  for (const auto& a : pass.encoder) out.emplace_back(a.col(0));
  if (net.head) out.emplace_back(pass.mean.col(0));
  for (std::size_t i = 1; i < pass.decoder.size(); ++i) out.emplace_back(pass.decoder[i].col(0));
  return out;
}

double LossMse(std::span<const float> pred, std::span<const float> target) {
  Require(pred.size() == target.size(), ErrorCode::kDimensionMismatch,
          "prediction and target lengths differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    sum += d * d;
  }
  return sum;
}

double KlGaussian(std::span<const float> mu, std::span<const float> logvar) {
  Require(mu.size() == logvar.size(), ErrorCode::kDimensionMismatch,
          "mean and log-variance lengths differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = mu[i], lv = logvar[i];
    sum += m * m + std::exp(lv) - 1.0 - lv;
  }
  return 0.5 * sum;
}

template <typename T>
BasicDenseNetwork<T> Backward(const BasicDenseNetwork<T>& net, const ForwardPass<T>& pass,
                              const Mat<T>& output_grad, T kl_scale) {
  Require(pass.encoder.size() == net.latent_index + 1 &&
              pass.decoder.size() == net.layers.size() - net.latent_index + 1,
          ErrorCode::kDimensionMismatch, "forward pass does not match network depth");
  Require(output_grad.rows() == pass.output().rows() && output_grad.cols() == pass.output().cols(),
          ErrorCode::kDimensionMismatch, "output gradient shape mismatch");

  BasicDenseNetwork<T> grad = net.ZerosLike();
  Mat<T> g = output_grad;
  for (std::size_t i = net.layers.size(); i-- > net.latent_index;) {
    const std::size_t j = i - net.latent_index;
    g = LayerBackward(net.layers[i], pass.decoder[j], pass.decoder[j + 1], std::move(g),
                      grad.layers[i]);
  }

  if (net.head) {
    const auto& head = *net.head;
    const auto sd = (pass.logvar.array() * T(0.5)).exp();
    const Mat<T> d_mean = g + kl_scale * pass.mean;
    const Mat<T> d_logvar =
        (g.array() * pass.noise.array() * sd * T(0.5) +
         kl_scale * T(0.5) * (pass.logvar.array().exp() - T(1)))
            .matrix();
    const Mat<T>& h = pass.encoder.back();
    grad.head->mean_layer.weights.noalias() = d_mean * h.transpose();
    grad.head->mean_layer.bias = d_mean.rowwise().sum();
    grad.head->logvar_layer.weights.noalias() = d_logvar * h.transpose();
    grad.head->logvar_layer.bias = d_logvar.rowwise().sum();
    g = head.mean_layer.weights.transpose() * d_mean +
        head.logvar_layer.weights.transpose() * d_logvar;
  }

  for (std::size_t i = net.latent_index; i-- > 0;) {
    g = LayerBackward(net.layers[i], pass.encoder[i], pass.encoder[i + 1], std::move(g),
                      grad.layers[i]);
  }
  return grad;
}

template <typename T>
LossAndGrad<T> ComputeLossAndGrad(const BasicDenseNetwork<T>& net, const Mat<T>& inputs,
                                  const Mat<T>& targets, double kl_weight,
                                  const Mat<T>* noise) {
  Require(inputs.cols() == targets.cols() && inputs.cols() > 0, ErrorCode::kDimensionMismatch,
          "input and target batch sizes differ or are empty");
  const ForwardPass<T> pass = ForwardBatch(net, inputs, noise);
  Require(targets.rows() == pass.output().rows(), ErrorCode::kDimensionMismatch,
          "target has " + std::to_string(targets.rows()) + " dims, network outputs " +
              std::to_string(pass.output().rows()));
  const auto batch = static_cast<double>(inputs.cols());
  const Mat<T> diff = pass.output() - targets;

  LossAndGrad<T> out;
  for (Eigen::Index b = 0; b < diff.cols(); ++b) {
    out.reconstruction += diff.col(b).template cast<double>().squaredNorm();
  }
  out.reconstruction /= batch;
  if (net.head) {
    double kl = 0.0;
    for (Eigen::Index b = 0; b < pass.mean.cols(); ++b) {
      for (Eigen::Index k = 0; k < pass.mean.rows(); ++k) {
        const double m = pass.mean(k, b), lv = pass.logvar(k, b);
        kl += m * m + std::exp(lv) - 1.0 - lv;
      }
    }
    out.kl = 0.5 * kl / batch;
  }
  out.loss = out.reconstruction + (net.head ? kl_weight * out.kl : 0.0);

  const Mat<T> output_grad = diff * static_cast<T>(2.0 / batch);
  out.grad = Backward(net, pass, output_grad, static_cast<T>(kl_weight / batch));
  return out;
}

Eigen::VectorXd BatchSquaredError(const DenseNetwork& net, const Mat<float>& inputs,
                                  const Mat<float>& targets) {
  const ForwardPass<float> pass = ForwardBatch<float>(net, inputs);
  Require(targets.rows() == pass.output().rows() && targets.cols() == inputs.cols(),
          ErrorCode::kDimensionMismatch, "target batch shape mismatch");
  Eigen::VectorXd err(inputs.cols());
  for (Eigen::Index b = 0; b < inputs.cols(); ++b) {
    err[b] = (pass.output().col(b) - targets.col(b)).cast<double>().squaredNorm();
  }
  return err;
}

StepResult AdamStep(std::span<const std::span<float>> params,
                    std::span<const std::span<const float>> grads, AdamState& state) {
  Require(params.size() == grads.size(), ErrorCode::kDimensionMismatch,
          "parameter and gradient lists differ in length");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Require(params[i].size() == grads[i].size(), ErrorCode::kDimensionMismatch,
            "parameter and gradient shapes differ");
    for (float g : grads[i]) {
      if (!std::isfinite(g)) return StepResult::kSkippedNonFinite;
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0f);
      state.second_moment.emplace_back(p.size(), 0.0f);
    }
  }
  Require(state.first_moment.size() == params.size(), ErrorCode::kDimensionMismatch,
          "optimizer state belongs to a different network");

  const AdamConfig& c = state.config;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    Require(m.size() == params[i].size(), ErrorCode::kDimensionMismatch,
            "optimizer state belongs to a different network");
    for (std::size_t k = 0; k < params[i].size(); ++k) {
      const double g = grads[i][k];
      const double mk = c.beta1 * m[k] + (1.0 - c.beta1) * g;
      const double vk = c.beta2 * v[k] + (1.0 - c.beta2) * g * g;
      m[k] = static_cast<float>(mk);
      v[k] = static_cast<float>(vk);
      const double update = c.lr * (mk / correction1) / (std::sqrt(vk / correction2) + c.eps);
      params[i][k] = static_cast<float>(params[i][k] - update);
    }
  }
  return StepResult::kApplied;
}

StepResult AdamStep(DenseNetwork& net, const DenseNetwork& grad, AdamState& state) {
  const auto params = net.ParameterSpans();
  const auto grads = grad.ParameterSpans();
  return AdamStep(std::span<const std::span<float>>(params),
                  std::span<const std::span<const float>>(grads), state);
}

template struct BasicDenseNetwork<float>;
template struct BasicDenseNetwork<double>;
template BasicDenseNetwork<double> BasicDenseNetwork<float>::Cast<double>() const;
template BasicDenseNetwork<float> BasicDenseNetwork<double>::Cast<float>() const;
template BasicDenseNetwork<float> BasicDenseNetwork<float>::Cast<float>() const;
template BasicDenseLayer<float> MakeLayer<float>(Eigen::Index, Eigen::Index, Activation,
                                                 std::mt19937_64&);
template BasicDenseLayer<double> MakeLayer<double>(Eigen::Index, Eigen::Index, Activation,
                                                   std::mt19937_64&);
template ForwardPass<float> ForwardBatch<float>(const DenseNetwork&, const Mat<float>&,
                                                const Mat<float>*);
template ForwardPass<double> ForwardBatch<double>(const BasicDenseNetwork<double>&,
                                                  const Mat<double>&, const Mat<double>*);
template DenseNetwork Backward<float>(const DenseNetwork&, const ForwardPass<float>&,
                                      const Mat<float>&, float);
template BasicDenseNetwork<double> Backward<double>(const BasicDenseNetwork<double>&,
                                                    const ForwardPass<double>&,
                                                    const Mat<double>&, double);
template LossAndGrad<float> ComputeLossAndGrad<float>(const DenseNetwork&, const Mat<float>&,
                                                      const Mat<float>&, double,
                                                      const Mat<float>*);
template LossAndGrad<double> ComputeLossAndGrad<double>(const BasicDenseNetwork<double>&,
                                                        const Mat<double>&,
                                                        const Mat<double>&, double,
                                                        const Mat<double>*);

}  // namespace asd
