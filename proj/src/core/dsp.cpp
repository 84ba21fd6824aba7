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

#include "core/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include <fftw3.h>

#include "core/error.hpp"

namespace asd {
namespace {

// The FFTW planner is not re-entrant; execution of a private plan is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(static_cast<std::size_t>(n));
    out_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(PlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void Execute() { fftw_execute(plan_); }
  double PowerAt(int k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }
  int size() const { return n_; }

 private:
  int n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace

Eigen::VectorXd MakeWindow(WindowKind kind, int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = kind == WindowKind::kHann
               ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n)
               : 1.0;
  }
  return w;
}

RowMatrixD StftPower(const AudioClip& clip, int frame_size, int hop_size,
                     WindowKind window) {
  Require(frame_size > 0 && frame_size % 2 == 0, ErrorCode::kInvalidArgument,
          "frame size must be positive and even");
  Require(hop_size > 0, ErrorCode::kInvalidArgument, "hop size must be positive");
  const auto len = static_cast<Eigen::Index>(clip.samples.size());
  Require(len >= frame_size, ErrorCode::kTooShort,
          "clip of " + std::to_string(len) + " samples is shorter than one frame");

  const Eigen::Index frames = (len - frame_size) / hop_size + 1;
  const int bins = frame_size / 2 + 1;
  const Eigen::VectorXd w = MakeWindow(window, frame_size);
  RealFft fft(frame_size);
  RowMatrixD power(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const float* src = clip.samples.data() + t * hop_size;
    double* dst = fft.input();
    for (int i = 0; i < frame_size; ++i) dst[i] = w[i] * static_cast<double>(src[i]);
    fft.Execute();
    for (int k = 0; k < bins; ++k) power(t, k) = fft.PowerAt(k);
  }
  return power;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

RowMatrixD MelFilterbank(int sample_rate, int n_fft, int n_mels) {
  Require(sample_rate > 0, ErrorCode::kInvalidArgument, "sample rate must be positive");
  Require(n_fft > 0 && n_fft % 2 == 0, ErrorCode::kInvalidArgument,
          "n_fft must be positive and even");
  Require(n_mels >= 1, ErrorCode::kInvalidArgument, "n_mels must be at least 1");

  const int bins = n_fft / 2 + 1;
  const double mel_max = HzToMel(sample_rate / 2.0);
  // n_mels + 2 edges: filter m rises from edge m, peaks at m + 1, falls at m + 2.
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_max * static_cast<double>(i) / (n_mels + 1));
  }

  RowMatrixD fb = RowMatrixD::Zero(n_mels, bins);
  const double hz_per_bin = static_cast<double>(sample_rate) / n_fft;
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * hz_per_bin;
      double v = 0.0;
      if (f > lo && f <= mid) {
        v = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        v = (hi - f) / (hi - mid);
      }
      fb(m, k) = v;
    }
    if (fb.row(m).maxCoeff() <= 0.0) {
      Fail(ErrorCode::kInvalidArgument,
           "Mel filter " + std::to_string(m) + " covers no FFT bin; n_mels " +
               std::to_string(n_mels) + " is too large for n_fft " + std::to_string(n_fft));
    }
  }
  return fb;
}

Spectrogram LogMel(const RowMatrixD& power, const RowMatrixD& filterbank, double floor) {
  Require(filterbank.cols() == power.cols(), ErrorCode::kDimensionMismatch,
          "filterbank has " + std::to_string(filterbank.cols()) + " bins, power has " +
              std::to_string(power.cols()));
  Require(floor > 0.0, ErrorCode::kInvalidArgument, "log floor must be positive");
  const RowMatrixD mel = power * filterbank.transpose();
  Spectrogram spec;
  spec.n_mels = static_cast<int>(filterbank.rows());
  spec.frames.resize(mel.rows(), mel.cols());
  for (Eigen::Index t = 0; t < mel.rows(); ++t) {
    for (Eigen::Index m = 0; m < mel.cols(); ++m) {
      const double e = mel(t, m);
      // NaN fails the comparison and is floored too.
      spec.frames(t, m) = static_cast<float>(std::log(e > floor ? e : floor));
    }
  }
  return spec;
}

Spectrogram ExtractLogMel(const AudioClip& clip, const FeatureParams& params) {
  ValidateClip(clip);
  Require(clip.sample_rate == params.sample_rate, ErrorCode::kDimensionMismatch,
          "clip sampled at " + std::to_string(clip.sample_rate) + " Hz, features expect " +
              std::to_string(params.sample_rate) + " Hz");
  const RowMatrixD power = StftPower(clip, params.frame_size, params.hop_size);
  const RowMatrixD fb = MelFilterbank(clip.sample_rate, params.frame_size, params.n_mels);
  Spectrogram spec = LogMel(power, fb, params.log_floor);
  spec.frame_size = params.frame_size;
  spec.hop_size = params.hop_size;
  return spec;
}

void WriteSpectrogramCsv(std::ostream& out, const Spectrogram& spec) {
  out << std::setprecision(9);
  for (Eigen::Index t = 0; t < spec.frames.rows(); ++t) {
    for (Eigen::Index m = 0; m < spec.frames.cols(); ++m) {
      if (m) out << ',';
      out << spec.frames(t, m);
    }
    out << '\n';
  }
}

}  // namespace asd
