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

#include "core/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "core/error.hpp"
#include "core/seed.hpp"

namespace asd {
namespace {

constexpr Eigen::Index kScoreBatch = 512;

Mat<float> GatherColumns(const RowMatrixF& rows, std::span<const std::size_t> idx) {
  Mat<float> out(rows.cols(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t b = 0; b < idx.size(); ++b) {
    out.col(static_cast<Eigen::Index>(b)) = rows.row(static_cast<Eigen::Index>(idx[b])).transpose();
  }
  return out;
}

// Runs fn(first_row, inputs, targets) over consecutive column batches.
template <typename Fn>
void ForEachScoreBatch(const WindowSet& ws, Fn&& fn) {
  for (Eigen::Index start = 0; start < ws.size(); start += kScoreBatch) {
    const Eigen::Index len = std::min(kScoreBatch, ws.size() - start);
    const Mat<float> in = ws.inputs.middleRows(start, len).transpose();
    const Mat<float> tgt = ws.targets.middleRows(start, len).transpose();
    fn(start, in, tgt);
  }
}

void CheckWindowsMatch(const ModelSpec& spec, const WindowSet& ws) {
  Require(ws.regime == spec.regime && ws.n == spec.n && ws.n_mels == spec.n_mels,
          ErrorCode::kDimensionMismatch,
          "windows (" + std::string(RegimeName(ws.regime)) + ", n=" + std::to_string(ws.n) +
              ", mels=" + std::to_string(ws.n_mels) + ") do not match the model (" +
              std::string(RegimeName(spec.regime)) + ", n=" + std::to_string(spec.n) +
              ", mels=" + std::to_string(spec.n_mels) + ")");
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kAe: return "ae";
    case ModelKind::kVae: return "vae";
    case ModelKind::kIdnn: return "idnn";
    case ModelKind::kVidnn: return "vidnn";
    case ModelKind::kPdnn: return "pdnn";
    case ModelKind::kVpdnn: return "vpdnn";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  for (ModelKind k : kAllModelKinds) {
    if (ModelKindName(k) == name) return k;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown model '" + std::string(name) + "' (expected ae, vae, idnn, vidnn, pdnn, vpdnn)");
}

Regime RegimeOf(ModelKind kind) {
  switch (kind) {
    case ModelKind::kAe:
    case ModelKind::kVae: return Regime::kReconstructAll;
    case ModelKind::kIdnn:
    case ModelKind::kVidnn: return Regime::kInterpolateCenter;
    case ModelKind::kPdnn:
    case ModelKind::kVpdnn: return Regime::kPredictNext;
  }
  return Regime::kReconstructAll;
}

bool IsVariational(ModelKind kind) {
  return kind == ModelKind::kVae || kind == ModelKind::kVidnn || kind == ModelKind::kVpdnn;
}

double DefaultKlWeight(ModelKind kind) {
  switch (kind) {
    case ModelKind::kVae: return 0.1;
    case ModelKind::kVidnn:
    case ModelKind::kVpdnn: return 0.01;
    default: return 0.0;
  }
}

ModelSpec ModelSpec::For(ModelKind kind, int n, int n_mels) {
  ModelSpec spec;
  spec.regime = RegimeOf(kind);
  spec.variational = IsVariational(kind);
  spec.n = n;
  spec.n_mels = n_mels;
  CheckRegime(spec.regime, n);
  Require(n_mels >= 1, ErrorCode::kInvalidArgument, "n_mels must be positive");
  spec.input_dim = InputDim(spec.regime, n, n_mels);
  spec.output_dim = OutputDim(spec.regime, n, n_mels);
  return spec;
}

ModelKind ModelSpec::kind() const {
  switch (regime) {
    case Regime::kReconstructAll: return variational ? ModelKind::kVae : ModelKind::kAe;
    case Regime::kInterpolateCenter: return variational ? ModelKind::kVidnn : ModelKind::kIdnn;
    case Regime::kPredictNext: return variational ? ModelKind::kVpdnn : ModelKind::kPdnn;
  }
  return ModelKind::kAe;
}

void ModelSpec::Validate() const {
  CheckRegime(regime, n);
  Require(n_mels >= 1, ErrorCode::kInvalidArgument, "n_mels must be positive");
  Require(input_dim == InputDim(regime, n, n_mels) && output_dim == OutputDim(regime, n, n_mels),
          ErrorCode::kDimensionMismatch,
          "input/output dims " + std::to_string(input_dim) + "/" + std::to_string(output_dim) +
              " inconsistent with regime " + std::string(RegimeName(regime)));
}

TrainedModel BuildModel(const ModelSpec& spec, std::uint64_t seed, const FeatureParams& features) {
  spec.Validate();
  Require(features.n_mels == spec.n_mels, ErrorCode::kDimensionMismatch,
          "feature n_mels differs from the model's");
  std::mt19937_64 rng(seed);
  const auto [h1, h2, latent] = kEncoderWidths;

  TrainedModel model;
  model.spec = spec;
  model.features = features;
  DenseNetwork& net = model.network;
  net.layers.push_back(MakeLayer<float>(spec.input_dim, h1, Activation::kRelu, rng));
  net.layers.push_back(MakeLayer<float>(h1, h2, Activation::kRelu, rng));
  if (spec.variational) {
    // logvar draws from its own stream so the other layers match the
    // deterministic model built from the same seed.
    std::mt19937_64 logvar_rng(DeriveSeed(seed, {0x6c6f67766172ULL}));
    net.head = VariationalHead{MakeLayer<float>(h2, latent, Activation::kNone, rng),
                               MakeLayer<float>(h2, latent, Activation::kNone, logvar_rng)};
  } else {
    net.layers.push_back(MakeLayer<float>(h2, latent, Activation::kRelu, rng));
  }
  net.latent_index = net.layers.size();
  net.layers.push_back(MakeLayer<float>(latent, h2, Activation::kRelu, rng));
  net.layers.push_back(MakeLayer<float>(h2, h1, Activation::kRelu, rng));
  net.layers.push_back(MakeLayer<float>(h1, spec.output_dim, Activation::kNone, rng));
  net.Validate();
  Require(net.output_dim() == spec.output_dim, ErrorCode::kInternal, "output width mismatch");
  model.norm_stats = NormStats::Identity(spec.n_mels);
  return model;
}

TrainedModel Train(TrainedModel model, const WindowSet& windows, const TrainConfig& config) {
  Require(windows.size() > 0, ErrorCode::kEmptyData, "cannot train on an empty window set");
  CheckWindowsMatch(model.spec, windows);
  Require(windows.norm_stats.has_value(), ErrorCode::kInvalidArgument,
          "training windows must be normalized first");
  Require(config.epochs >= 1 && config.batch_size >= 1, ErrorCode::kInvalidArgument,
          "epochs and batch size must be positive");
  Require(config.kl_weight >= 0.0, ErrorCode::kInvalidArgument, "KL weight must be non-negative");

  model.norm_stats = *windows.norm_stats;
  model.loss_history.clear();
  const double kl_weight = model.spec.variational ? config.kl_weight : 0.0;
  const Eigen::Index latent = model.network.head ? model.network.head->latent_dim() : 0;

  std::mt19937_64 rng(config.seed);
  // Separate stream so batch order does not depend on the model kind.
  std::mt19937_64 noise_rng(DeriveSeed(config.seed, {0x6e6f697365ULL}));
  std::normal_distribution<float> normal(0.0f, 1.0f);
  AdamState adam;
  adam.config = config.adam;

  std::vector<std::size_t> order(static_cast<std::size_t>(windows.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);
  Mat<float> noise;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t applied = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const std::span<const std::size_t> idx(order.data() + start, len);
      const Mat<float> in = GatherColumns(windows.inputs, idx);
      const Mat<float> tgt = GatherColumns(windows.targets, idx);
      const Mat<float>* noise_ptr = nullptr;
      if (latent > 0) {
        noise.resize(latent, static_cast<Eigen::Index>(len));
        for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = normal(noise_rng);
        noise_ptr = &noise;
      }
      LossAndGrad<float> step = ComputeLossAndGrad(model.network, in, tgt, kl_weight, noise_ptr);
      epoch_loss += step.loss * static_cast<double>(len);
      if (AdamStep(model.network, step.grad, adam) == StepResult::kApplied) ++applied;
    }
    Require(applied > 0, ErrorCode::kNonFinite,
            "training diverged: every step of epoch " + std::to_string(epoch + 1) +
                " had non-finite gradients");
    model.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return model;
}

TrainedModel FitModel(ModelKind kind, int n, const FeatureParams& features,
                      std::span<const Spectrogram> training, const TrainConfig& config,
                      std::uint64_t init_seed, bool train) {
  Require(!training.empty(), ErrorCode::kEmptyData, "no training spectrograms");
  const ModelSpec spec = ModelSpec::For(kind, n, features.n_mels);
  std::vector<WindowSet> parts;
  parts.reserve(training.size());
  for (const Spectrogram& s : training) parts.push_back(MakeWindows(s, n, spec.regime));
  WindowSet pooled = ConcatWindows(parts);
  parts.clear();
  const NormStats stats = FitNormStats(pooled);
  pooled = ApplyNorm(std::move(pooled), stats);

  TrainedModel model = BuildModel(spec, init_seed, features);
  if (!train) {
    model.norm_stats = stats;
    return model;
  }
  return Train(std::move(model), pooled, config);
}

double ScoreWindow(const TrainedModel& model, std::span<const float> input,
                   std::span<const float> target) {
  Require(input.size() == static_cast<std::size_t>(model.spec.input_dim) &&
              target.size() == static_cast<std::size_t>(model.spec.output_dim),
          ErrorCode::kDimensionMismatch, "window dims do not match the model");
  const Mat<float> in = Eigen::Map<const Eigen::VectorXf>(input.data(), static_cast<Eigen::Index>(input.size()));
  const Mat<float> tgt = Eigen::Map<const Eigen::VectorXf>(target.data(), static_cast<Eigen::Index>(target.size()));
  return BatchSquaredError(model.network, in, tgt)[0];
}

std::vector<double> ScoreWindows(const TrainedModel& model, const WindowSet& normalized) {
  CheckWindowsMatch(model.spec, normalized);
  std::vector<double> scores(static_cast<std::size_t>(normalized.size()));
  ForEachScoreBatch(normalized, [&](Eigen::Index start, const Mat<float>& in, const Mat<float>& tgt) {
    const Eigen::VectorXd err = BatchSquaredError(model.network, in, tgt);
    std::copy(err.data(), err.data() + err.size(), scores.begin() + start);
  });
  return scores;
}

double ScoreSegment(const TrainedModel& model, const Spectrogram& spec) {
  const WindowSet ws =
      ApplyNorm(MakeWindows(spec, model.spec.n, model.spec.regime), model.norm_stats);
  const std::vector<double> scores = ScoreWindows(model, ws);
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

RowMatrixD WindowErrorMatrix(const TrainedModel& model, const Spectrogram& spec) {
  const WindowSet ws =
      ApplyNorm(MakeWindows(spec, model.spec.n, model.spec.regime), model.norm_stats);
  CheckWindowsMatch(model.spec, ws);
  const int mels = model.spec.n_mels;
  RowMatrixD errors = RowMatrixD::Zero(ws.size(), mels);
  ForEachScoreBatch(ws, [&](Eigen::Index start, const Mat<float>& in, const Mat<float>& tgt) {
    const ForwardPass<float> pass = ForwardBatch<float>(model.network, in);
    for (Eigen::Index b = 0; b < in.cols(); ++b) {
      for (Eigen::Index j = 0; j < tgt.rows(); ++j) {
        const double d = static_cast<double>(pass.output()(j, b)) - tgt(j, b);
        errors(start + b, j % mels) += d * d;
      }
    }
  });
  return errors;
}

}  // namespace asd
