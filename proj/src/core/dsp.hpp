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

#ifndef ASD_CORE_DSP_HPP_
#define ASD_CORE_DSP_HPP_

#include <iosfwd>

#include <Eigen/Core>

#include "core/audio.hpp"

namespace asd {

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class WindowKind { kHann, kRectangular };

// Front-end parameters. Defaults: 16 kHz input, 1024-sample frames,
// 512-sample hop, 64 Mel bands, natural log with a 1e-10 floor.
struct FeatureParams {
  int sample_rate = 16000;
  int frame_size = 1024;
  int hop_size = 512;
  int n_mels = 64;
  double log_floor = 1e-10;
};

// T x M log-Mel energies, frame-major.
struct Spectrogram {
  RowMatrixF frames;
  int frame_size = 0;
  int hop_size = 0;
  int n_mels = 0;

  Eigen::Index num_frames() const { return frames.rows(); }
};

// Periodic window of length n (w[i] = 0.5 - 0.5 cos(2 pi i / n) for Hann).
Eigen::VectorXd MakeWindow(WindowKind kind, int n);

// Power spectrum of each complete frame; incomplete trailing frames are
// dropped. Returns T x (frame_size / 2 + 1) with
// T = floor((len - frame_size) / hop_size) + 1.
RowMatrixD StftPower(const AudioClip& clip, int frame_size, int hop_size,
                     WindowKind window = WindowKind::kHann);

// HTK-style Mel scale: mel = 2595 log10(1 + f / 700).
double HzToMel(double hz);
double MelToHz(double mel);

// n_mels triangular filters with peaks of 1, centers equally spaced in Mel
// between 0 Hz and sample_rate / 2. Returns n_mels x (n_fft / 2 + 1).
// Throws kInvalidArgument when any filter would contain no FFT bin.
RowMatrixD MelFilterbank(int sample_rate, int n_fft, int n_mels);

// ln(max(filterbank * power_row, floor)) for each frame. The returned
// spectrogram has frame_size and hop_size left at 0.
Spectrogram LogMel(const RowMatrixD& power, const RowMatrixD& filterbank,
                   double floor = 1e-10);

// Full chain: STFT power -> Mel filterbank -> log. Throws
// kDimensionMismatch when the clip's rate differs from params.sample_rate.
Spectrogram ExtractLogMel(const AudioClip& clip, const FeatureParams& params);

// One line per frame, n_mels comma-separated values.
void WriteSpectrogramCsv(std::ostream& out, const Spectrogram& spec);

}  // namespace asd

#endif  // ASD_CORE_DSP_HPP_
