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

#ifndef ASD_CORE_MODELS_HPP_
#define ASD_CORE_MODELS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/dsp.hpp"
#include "core/neuralnet.hpp"
#include "core/windowing.hpp"

namespace asd {

// The six detectors: {reconstruct, interpolate, predict} x {plain, variational}.
enum class ModelKind { kAe, kVae, kIdnn, kVidnn, kPdnn, kVpdnn };

inline constexpr std::array<ModelKind, 6> kAllModelKinds = {
    ModelKind::kAe, ModelKind::kVae, ModelKind::kIdnn,
    ModelKind::kVidnn, ModelKind::kPdnn, ModelKind::kVpdnn};

std::string_view ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);
Regime RegimeOf(ModelKind kind);
bool IsVariational(ModelKind kind);
// KL weights 0.1 (VAE), 0.01 (VIDNN, VPDNN); 0 for the plain models.
double DefaultKlWeight(ModelKind kind);

// Encoder 64-32-16, decoder 32-64; the variational head replaces the 32->16
// layer with parallel 16-wide mean and log-variance layers.
inline constexpr std::array<int, 3> kEncoderWidths = {64, 32, 16};

struct ModelSpec {
  Regime regime = Regime::kReconstructAll;
  bool variational = false;
  int n = 5;
  int n_mels = 64;
  int input_dim = 0;
  int output_dim = 0;

  static ModelSpec For(ModelKind kind, int n, int n_mels);
  ModelKind kind() const;
  // Throws kInvalidArgument / kDimensionMismatch on inconsistent fields.
  void Validate() const;
};

struct TrainConfig {
  int epochs = 50;
  int batch_size = 64;
  AdamConfig adam;
  double kl_weight = 0.0;
  std::uint64_t seed = 0;
};

struct TrainedModel {
  ModelSpec spec;
  FeatureParams features;
  DenseNetwork network;
  NormStats norm_stats;
  std::vector<double> loss_history;  // mean training loss per epoch
};

// Untrained model with Glorot-uniform weights and identity normalization.
TrainedModel BuildModel(const ModelSpec& spec, std::uint64_t seed,
                        const FeatureParams& features = {});

// Mini-batch Adam on the regime's loss (plus kl_weight * KL when
// variational). Windows must already be normalized; their stats are stored
// in the returned model.
TrainedModel Train(TrainedModel model, const WindowSet& windows, const TrainConfig& config);

// Windows every training spectrogram, fits normalization on the pooled
// windows, builds the network from init_seed and (when train is set) trains
// it. With train unset the result is the random-init model carrying the
// fitted normalization.
TrainedModel FitModel(ModelKind kind, int n, const FeatureParams& features,
                      std::span<const Spectrogram> training, const TrainConfig& config,
                      std::uint64_t init_seed, bool train = true);

// Squared error between the model output and target in normalized feature
// space. Variational models use the posterior mean.
double ScoreWindow(const TrainedModel& model, std::span<const float> input,
                   std::span<const float> target);

// Per-window scores for an already-normalized window set.
std::vector<double> ScoreWindows(const TrainedModel& model, const WindowSet& normalized);

// Mean window score over a raw (unnormalized) spectrogram.
double ScoreSegment(const TrainedModel& model, const Spectrogram& spec);

// (T - n + 1) x n_mels squared errors per window and Mel band. For the
// reconstruct-all regime the n frame errors of a band are summed, so each
// row sums to the window score.
RowMatrixD WindowErrorMatrix(const TrainedModel& model, const Spectrogram& spec);

}  // namespace asd

#endif  // ASD_CORE_MODELS_HPP_
