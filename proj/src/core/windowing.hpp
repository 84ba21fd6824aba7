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

#ifndef ASD_CORE_WINDOWING_HPP_
#define ASD_CORE_WINDOWING_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "core/dsp.hpp"

namespace asd {

// Which frames of an n-frame window are fed in and which are predicted.
//   kReconstructAll:    all n frames in, the same n frames out (AE/VAE).
//   kInterpolateCenter: n-1 frames in with the center removed, center out.
//   kPredictNext:       frames 1..n-1 in, frame n out.
enum class Regime : std::uint32_t {
  kReconstructAll = 0,
  kInterpolateCenter = 1,
  kPredictNext = 2,
};

std::string_view RegimeName(Regime regime);

// Validates (regime, n): n >= 2, and odd for kInterpolateCenter.
void CheckRegime(Regime regime, int n);

int InputDim(Regime regime, int n, int n_mels);
int OutputDim(Regime regime, int n, int n_mels);

// Per-Mel-band standardization statistics, shared by every frame position.
struct NormStats {
  Eigen::VectorXf mean;
  Eigen::VectorXf stddev;

  int n_mels() const { return static_cast<int>(mean.size()); }
  static NormStats Identity(int n_mels);
};

struct WindowSet {
  Regime regime = Regime::kReconstructAll;
  int n = 0;
  int n_mels = 0;
  RowMatrixF inputs;   // N x d_in, frame-major within a row
  RowMatrixF targets;  // N x d_out
  std::optional<NormStats> norm_stats;

  Eigen::Index size() const { return inputs.rows(); }
};

// One window per start frame (stride 1): N = T - n + 1.
WindowSet MakeWindows(const Spectrogram& spec, int n, Regime regime);

// Stacks window sets built with identical (regime, n, n_mels).
WindowSet ConcatWindows(std::span<const WindowSet> parts);

// Population mean and standard deviation per Mel band over inputs and
// targets jointly; stddev is floored at 1e-8. Requires N >= 2.
NormStats FitNormStats(const WindowSet& ws);

// (v - mean) / stddev on inputs and targets; records the stats used.
WindowSet ApplyNorm(WindowSet ws, const NormStats& stats);

// Undoes ApplyNorm using the recorded stats.
WindowSet InvertNorm(WindowSet ws);

// Flat little-endian blob: u32 regime, n, n_mels, N; then float32 inputs
// (row-major) followed by targets.
void WriteWindowSet(std::ostream& out, const WindowSet& ws);
WindowSet ReadWindowSet(std::istream& in);

}  // namespace asd

#endif  // ASD_CORE_WINDOWING_HPP_
