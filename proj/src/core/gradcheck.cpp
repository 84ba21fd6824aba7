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

#include "core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/windowing.hpp"

namespace asd {
namespace {

double Objective(const BasicDenseNetwork<double>& net, const Mat<double>& x, const Mat<double>& t,
                 LossKind kind, const Mat<double>* noise, double kl_weight) {
  const ForwardPass<double> pass = ForwardBatch(net, x, noise);
  double loss = (pass.output() - t).squaredNorm();
  if (kind == LossKind::kMseKl && net.head) {
    loss += kl_weight * 0.5 *
            (pass.mean.array().square() + pass.logvar.array().exp() - 1.0 - pass.logvar.array())
                .sum();
  }
  return loss;
}

double MarginOf(const BasicDenseLayer<double>& layer, const Mat<double>& in, Mat<double>& out) {
  Mat<double> z = layer.weights * in;
  z.colwise() += layer.bias;
  double margin = std::numeric_limits<double>::infinity();
  if (layer.activation == Activation::kRelu) {
    margin = z.cwiseAbs().minCoeff();
    z = z.cwiseMax(0.0);
  }
  out = std::move(z);
  return margin;
}

}  // namespace

double MinReluMargin(const BasicDenseNetwork<double>& net, const Vec<double>& x,
                     const Vec<double>* noise) {
  double margin = std::numeric_limits<double>::infinity();
  Mat<double> a = x;
  Mat<double> next;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (i == net.latent_index && net.head) {
      Mat<double> mean, logvar;
      margin = std::min(margin, MarginOf(net.head->mean_layer, a, mean));
      margin = std::min(margin, MarginOf(net.head->logvar_layer, a, logvar));
      a = noise ? Mat<double>(mean.array() + (0.5 * logvar.array()).exp() * noise->array())
                : mean;
    }
    margin = std::min(margin, MarginOf(net.layers[i], a, next));
    a = next;
  }
  return margin;
}

double GradCheck(const BasicDenseNetwork<double>& net, const Vec<double>& x,
                 const Vec<double>& target, LossKind kind, const Vec<double>* noise,
                 const GradCheckOptions& options) {
  net.Validate();
  const Mat<double> xb = x;
  const Mat<double> tb = target;
  Mat<double> noise_batch;
  const Mat<double>* noise_ptr = nullptr;
  if (noise) {
    noise_batch = *noise;
    noise_ptr = &noise_batch;
  }
  const double kl_weight = kind == LossKind::kMseKl ? options.kl_weight : 0.0;
  LossAndGrad<double> analytic = ComputeLossAndGrad(net, xb, tb, kl_weight, noise_ptr);
  auto grad_spans = analytic.grad.ParameterSpans();
  if (options.corrupt) {
    // Bump the largest-magnitude entry by 1%.
    double* target_entry = nullptr;
    for (auto& s : grad_spans) {
      for (double& g : s) {
        if (!target_entry || std::abs(g) > std::abs(*target_entry)) target_entry = &g;
      }
    }
    if (target_entry) *target_entry = *target_entry * 1.01 + 1e-3;
  }

  BasicDenseNetwork<double> probe = net;
  auto param_spans = probe.ParameterSpans();
  double worst = 0.0;
  for (std::size_t s = 0; s < param_spans.size(); ++s) {
    for (std::size_t k = 0; k < param_spans[s].size(); ++k) {
      double& p = param_spans[s][k];
      const double saved = p;
      p = saved + options.step;
      const double up = Objective(probe, xb, tb, kind, noise_ptr, kl_weight);
      p = saved - options.step;
      const double down = Objective(probe, xb, tb, kind, noise_ptr, kl_weight);
      p = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = grad_spans[s][k];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

double GradCheck(const DenseNetwork& net, const Eigen::VectorXf& x, const Eigen::VectorXf& target,
                 LossKind kind, const Eigen::VectorXf* noise, const GradCheckOptions& options) {
  const Vec<double> noise_d = noise ? Vec<double>(noise->cast<double>()) : Vec<double>();
  return GradCheck(net.Cast<double>(), x.cast<double>(), target.cast<double>(), kind,
                   noise ? &noise_d : nullptr, options);
}

std::vector<GradCheckRow> RunGradCheckSuite(int networks_per_kind, std::uint64_t seed,
                                            double threshold, bool corrupt) {
  Require(networks_per_kind >= 1, ErrorCode::kInvalidArgument,
          "need at least one network per loss kind");
  struct Case {
    const char* name;
    Regime regime;
    bool variational;
  };
  const Case cases[] = {
      {"reconstruct", Regime::kReconstructAll, false},
      {"interpolate", Regime::kInterpolateCenter, false},
      {"predict", Regime::kPredictNext, false},
      {"variational", Regime::kReconstructAll, true},
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> width(3, 7);
  std::uniform_int_distribution<int> bands(2, 4);
  GradCheckOptions options;
  options.corrupt = corrupt;

  std::vector<GradCheckRow> rows;
  for (const Case& c : cases) {
    GradCheckRow row;
    row.loss_kind = c.name;
    for (int trial = 0; trial < networks_per_kind; ++trial) {
      const int mels = bands(rng);
      const int n = 3;
      const int in_dim = InputDim(c.regime, n, mels);
      const int out_dim = OutputDim(c.regime, n, mels);
      const int h1 = width(rng), h2 = width(rng), latent = width(rng);

      BasicDenseNetwork<double> net;
      bool ready = false;
      Vec<double> x, t, noise;
      for (int attempt = 0; attempt < 200 && !ready; ++attempt) {
        if (attempt % 20 == 0) {
          net = {};
          net.layers.push_back(MakeLayer<double>(in_dim, h1, Activation::kRelu, rng));
          net.layers.push_back(MakeLayer<double>(h1, h2, Activation::kRelu, rng));
          if (c.variational) {
            net.head = BasicVariationalHead<double>{
                MakeLayer<double>(h2, latent, Activation::kNone, rng),
                MakeLayer<double>(h2, latent, Activation::kNone, rng)};
          } else {
            net.layers.push_back(MakeLayer<double>(h2, latent, Activation::kRelu, rng));
          }
          net.latent_index = net.layers.size();
          net.layers.push_back(MakeLayer<double>(latent, h2, Activation::kRelu, rng));
          net.layers.push_back(MakeLayer<double>(h2, h1, Activation::kRelu, rng));
          net.layers.push_back(MakeLayer<double>(h1, out_dim, Activation::kNone, rng));
          // Non-zero biases so the bias gradients are exercised off the origin.
          for (auto& l : net.layers) {
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = 0.1 * normal(rng);
          }
        }
        Spectrogram spec;
        spec.frames.resize(n, mels);
        for (Eigen::Index i = 0; i < spec.frames.size(); ++i) {
          spec.frames.data()[i] = static_cast<float>(normal(rng));
        }
        const WindowSet ws = MakeWindows(spec, n, c.regime);
        x = ws.inputs.row(0).transpose().cast<double>();
        t = ws.targets.row(0).transpose().cast<double>();
        if (c.variational) {
          noise.resize(latent);
          for (Eigen::Index i = 0; i < latent; ++i) noise[i] = normal(rng);
        }
        ready = MinReluMargin(net, x, c.variational ? &noise : nullptr) > 1e-2;
      }
      Require(ready, ErrorCode::kInternal, "could not sample an input away from ReLU kinks");
      const double err = GradCheck(net, x, t, c.variational ? LossKind::kMseKl : LossKind::kMse,
                                   c.variational ? &noise : nullptr, options);
      row.max_rel_error = std::max(row.max_rel_error, err);
      ++row.networks;
    }
    row.passed = row.max_rel_error < threshold;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace asd
