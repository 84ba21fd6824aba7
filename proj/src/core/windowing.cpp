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

#include "core/windowing.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "core/error.hpp"

namespace asd {
namespace {

constexpr float kStdFloor = 1e-8f;

void WriteU32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t ReadU32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    Fail(ErrorCode::kFormat, "truncated window-set header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Host is assumed little-endian (x86-64, AArch64).
void WriteFloats(std::ostream& out, const RowMatrixF& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(float)));
}

void ReadFloats(std::istream& in, RowMatrixF& m) {
  if (!in.read(reinterpret_cast<char*>(m.data()),
               static_cast<std::streamsize>(m.size() * sizeof(float)))) {
    Fail(ErrorCode::kFormat, "truncated window-set body");
  }
}

template <typename Fn>
void ForEachBand(RowMatrixF& m, int n_mels, Fn&& fn) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    float* row = m.row(r).data();
    for (Eigen::Index j = 0; j < m.cols(); ++j) fn(row[j], static_cast<int>(j % n_mels));
  }
}

}  // namespace

std::string_view RegimeName(Regime regime) {
  switch (regime) {
    case Regime::kReconstructAll: return "reconstruct_all";
    case Regime::kInterpolateCenter: return "interpolate_center";
    case Regime::kPredictNext: return "predict_next";
  }
  return "unknown";
}

void CheckRegime(Regime regime, int n) {
  Require(n >= 2, ErrorCode::kInvalidArgument, "window length n must be at least 2");
  if (regime == Regime::kInterpolateCenter) {
    Require(n % 2 == 1, ErrorCode::kInvalidArgument,
            "interpolation needs an odd window length, got " + std::to_string(n));
  }
}

int InputDim(Regime regime, int n, int n_mels) {
  return regime == Regime::kReconstructAll ? n * n_mels : (n - 1) * n_mels;
}

int OutputDim(Regime regime, int n, int n_mels) {
  return regime == Regime::kReconstructAll ? n * n_mels : n_mels;
}

NormStats NormStats::Identity(int n_mels) {
  return {Eigen::VectorXf::Zero(n_mels), Eigen::VectorXf::Ones(n_mels)};
}

WindowSet MakeWindows(const Spectrogram& spec, int n, Regime regime) {
  CheckRegime(regime, n);
  const Eigen::Index frames = spec.frames.rows();
  const int mels = static_cast<int>(spec.frames.cols());
  Require(mels >= 1, ErrorCode::kInvalidArgument, "spectrogram has no Mel bands");
  Require(frames >= n, ErrorCode::kTooShort,
          "spectrogram has " + std::to_string(frames) + " frames, window needs " +
              std::to_string(n));

  WindowSet ws;
  ws.regime = regime;
  ws.n = n;
  ws.n_mels = mels;
  const Eigen::Index count = frames - n + 1;
  ws.inputs.resize(count, InputDim(regime, n, mels));
  ws.targets.resize(count, OutputDim(regime, n, mels));

  const int held_out = regime == Regime::kInterpolateCenter ? (n - 1) / 2
                       : regime == Regime::kPredictNext    ? n - 1
                                                           : -1;
  for (Eigen::Index i = 0; i < count; ++i) {
    int slot = 0;
    for (int f = 0; f < n; ++f) {
      if (f == held_out) continue;
      ws.inputs.block(i, static_cast<Eigen::Index>(slot) * mels, 1, mels) = spec.frames.row(i + f);
      ++slot;
    }
    if (held_out < 0) {
      ws.targets.row(i) = ws.inputs.row(i);
    } else {
      ws.targets.row(i) = spec.frames.row(i + held_out);
    }
  }
  return ws;
}

WindowSet ConcatWindows(std::span<const WindowSet> parts) {
  Require(!parts.empty(), ErrorCode::kEmptyData, "no window sets to concatenate");
  WindowSet out;
  out.regime = parts.front().regime;
  out.n = parts.front().n;
  out.n_mels = parts.front().n_mels;
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    Require(p.regime == out.regime && p.n == out.n && p.n_mels == out.n_mels,
            ErrorCode::kDimensionMismatch, "window sets differ in regime or shape");
    total += p.size();
  }
  out.inputs.resize(total, parts.front().inputs.cols());
  out.targets.resize(total, parts.front().targets.cols());
  Eigen::Index row = 0;
  for (const auto& p : parts) {
    out.inputs.middleRows(row, p.size()) = p.inputs;
    out.targets.middleRows(row, p.size()) = p.targets;
    row += p.size();
  }
  return out;
}

NormStats FitNormStats(const WindowSet& ws) {
  Require(ws.size() >= 2, ErrorCode::kEmptyData,
          "normalization statistics need at least two windows");
  const int mels = ws.n_mels;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(mels);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(mels);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(mels);
  auto accumulate = [&](const RowMatrixF& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double v = m(r, j);
        const auto band = j % mels;
        sum[band] += v;
        count[band] += 1.0;
      }
    }
  };
  accumulate(ws.inputs);
  accumulate(ws.targets);
  const Eigen::VectorXd mean = sum.cwiseQuotient(count);
  // Second pass about the mean keeps the variance well conditioned.
  auto accumulate_sq = [&](const RowMatrixF& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const auto band = j % mels;
        const double d = m(r, j) - mean[band];
        sum_sq[band] += d * d;
      }
    }
  };
  accumulate_sq(ws.inputs);
  accumulate_sq(ws.targets);

  NormStats stats;
  stats.mean = mean.cast<float>();
  stats.stddev.resize(mels);
  for (int m = 0; m < mels; ++m) {
    const auto sd = static_cast<float>(std::sqrt(sum_sq[m] / count[m]));
    stats.stddev[m] = sd > kStdFloor ? sd : kStdFloor;
  }
  return stats;
}

WindowSet ApplyNorm(WindowSet ws, const NormStats& stats) {
  Require(stats.n_mels() == ws.n_mels && stats.stddev.size() == stats.mean.size(),
          ErrorCode::kDimensionMismatch,
          "normalization stats have " + std::to_string(stats.n_mels()) +
              " bands, windows have " + std::to_string(ws.n_mels));
  auto standardize = [&](float& v, int band) { v = (v - stats.mean[band]) / stats.stddev[band]; };
  ForEachBand(ws.inputs, ws.n_mels, standardize);
  ForEachBand(ws.targets, ws.n_mels, standardize);
  ws.norm_stats = stats;
  return ws;
}

WindowSet InvertNorm(WindowSet ws) {
  Require(ws.norm_stats.has_value(), ErrorCode::kInvalidArgument,
          "window set carries no normalization stats");
  const NormStats stats = *ws.norm_stats;
  auto restore = [&](float& v, int band) { v = v * stats.stddev[band] + stats.mean[band]; };
  ForEachBand(ws.inputs, ws.n_mels, restore);
  ForEachBand(ws.targets, ws.n_mels, restore);
  ws.norm_stats.reset();
  return ws;
}

void WriteWindowSet(std::ostream& out, const WindowSet& ws) {
  WriteU32(out, static_cast<std::uint32_t>(ws.regime));
  WriteU32(out, static_cast<std::uint32_t>(ws.n));
  WriteU32(out, static_cast<std::uint32_t>(ws.n_mels));
  WriteU32(out, static_cast<std::uint32_t>(ws.size()));
  WriteFloats(out, ws.inputs);
  WriteFloats(out, ws.targets);
  if (!out) Fail(ErrorCode::kIo, "failed writing window set");
}

WindowSet ReadWindowSet(std::istream& in) {
  WindowSet ws;
  const std::uint32_t regime = ReadU32(in);
  Require(regime <= 2, ErrorCode::kFormat, "unknown regime code " + std::to_string(regime));
  ws.regime = static_cast<Regime>(regime);
  ws.n = static_cast<int>(ReadU32(in));
  ws.n_mels = static_cast<int>(ReadU32(in));
  const auto count = static_cast<Eigen::Index>(ReadU32(in));
  CheckRegime(ws.regime, ws.n);
  Require(ws.n_mels >= 1, ErrorCode::kFormat, "window set has no Mel bands");
  ws.inputs.resize(count, InputDim(ws.regime, ws.n, ws.n_mels));
  ws.targets.resize(count, OutputDim(ws.regime, ws.n, ws.n_mels));
  ReadFloats(in, ws.inputs);
  ReadFloats(in, ws.targets);
  return ws;
}

}  // namespace asd
