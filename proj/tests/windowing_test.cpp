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

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "core/windowing.hpp"
#include "test_support.hpp"

namespace asd {
namespace {

using testing::Gen;

TEST(MakeWindows, ReconstructAllDims) {
  Gen gen(1);
  const WindowSet ws = MakeWindows(gen.Spec(6, 64), 5, Regime::kReconstructAll);
  EXPECT_EQ(ws.size(), 2);
  EXPECT_EQ(ws.inputs.cols(), 320);
  EXPECT_EQ(ws.targets.cols(), 320);
  EXPECT_EQ(ws.inputs, ws.targets);
}

TEST(MakeWindows, InterpolateCenterDims) {
  Gen gen(2);
  const Spectrogram s = gen.Spec(6, 64);
  const WindowSet ws = MakeWindows(s, 5, Regime::kInterpolateCenter);
  EXPECT_EQ(ws.size(), 2);
  EXPECT_EQ(ws.inputs.cols(), 256);
  EXPECT_EQ(ws.targets.cols(), 64);
  // Window 1 holds frames 1,2,4,5 and predicts frame 3 (0-based).
  for (int m = 0; m < 64; ++m) {
    EXPECT_EQ(ws.targets(1, m), s.frames(3, m));
    EXPECT_EQ(ws.inputs(1, m), s.frames(1, m));
    EXPECT_EQ(ws.inputs(1, 64 + m), s.frames(2, m));
    EXPECT_EQ(ws.inputs(1, 128 + m), s.frames(4, m));
    EXPECT_EQ(ws.inputs(1, 192 + m), s.frames(5, m));
  }
}

TEST(MakeWindows, PredictNextSingleWindow) {
  Gen gen(3);
  const Spectrogram s = gen.Spec(5, 64);
  const WindowSet ws = MakeWindows(s, 5, Regime::kPredictNext);
  ASSERT_EQ(ws.size(), 1);
  for (int m = 0; m < 64; ++m) {
    EXPECT_EQ(ws.targets(0, m), s.frames(4, m));
    for (int f = 0; f < 4; ++f) EXPECT_EQ(ws.inputs(0, f * 64 + m), s.frames(f, m));
  }
}

TEST(MakeWindows, Errors) {
  Gen gen(4);
  EXPECT_ASD_ERROR(MakeWindows(gen.Spec(4, 8), 5, Regime::kReconstructAll), ErrorCode::kTooShort);
  EXPECT_ASD_ERROR(MakeWindows(gen.Spec(9, 8), 4, Regime::kInterpolateCenter), ErrorCode::kInvalidArgument);
  EXPECT_ASD_ERROR(MakeWindows(gen.Spec(9, 8), 1, Regime::kPredictNext), ErrorCode::kInvalidArgument);
}

TEST(MakeWindows, CountsForRandomShapes) {
  Gen gen(5);
  const Regime regimes[] = {Regime::kReconstructAll, Regime::kInterpolateCenter, Regime::kPredictNext};
  for (int trial = 0; trial < 200; ++trial) {
    const Regime r = regimes[gen.Int(0, 2)];
    int n = gen.Int(2, 9);
    if (r == Regime::kInterpolateCenter && n % 2 == 0) ++n;
    const int t = gen.Int(n, 40);
    const int m = gen.Int(1, 6);
    const WindowSet ws = MakeWindows(gen.Spec(t, m), n, r);
    EXPECT_EQ(ws.size(), t - n + 1);
    EXPECT_EQ(ws.inputs.cols(), InputDim(r, n, m));
    EXPECT_EQ(ws.targets.cols(), OutputDim(r, n, m));
    if (r == Regime::kReconstructAll) {
      EXPECT_EQ(ws.inputs, ws.targets);
    }
  }
}

// Changing the held-out frame must move only the target.
TEST(MakeWindows, HeldOutFrameNeverInInput) {
  Gen gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const bool interp = gen.Coin();
    const Regime r = interp ? Regime::kInterpolateCenter : Regime::kPredictNext;
    const int n = interp ? 2 * gen.Int(1, 4) + 1 : gen.Int(2, 8);
    const int m = gen.Int(1, 5);
    Spectrogram s = gen.Spec(n, m);
    const WindowSet a = MakeWindows(s, n, r);
    const int held = interp ? (n - 1) / 2 : n - 1;
    for (int j = 0; j < m; ++j) s.frames(held, j) += 1.0f;
    const WindowSet b = MakeWindows(s, n, r);
    EXPECT_EQ(a.inputs, b.inputs);
    EXPECT_NE(a.targets, b.targets);
  }
}

TEST(NormStats, ConstantWindowsFloorTheStd) {
  Spectrogram s;
  s.frames = RowMatrixF::Constant(6, 3, 2.5f);
  s.n_mels = 3;
  const NormStats st = FitNormStats(MakeWindows(s, 3, Regime::kReconstructAll));
  for (int m = 0; m < 3; ++m) {
    EXPECT_FLOAT_EQ(st.mean[m], 2.5f);
    EXPECT_FLOAT_EQ(st.stddev[m], 1e-8f);
  }
}

TEST(NormStats, HandArithmeticPopulationStd) {
  WindowSet ws;
  ws.regime = Regime::kReconstructAll;
  ws.n = 1;
  ws.n_mels = 1;
  ws.inputs.resize(2, 1);
  ws.inputs << 0.0f, 2.0f;
  ws.targets = ws.inputs;
  const NormStats st = FitNormStats(ws);
  EXPECT_FLOAT_EQ(st.mean[0], 1.0f);
  EXPECT_FLOAT_EQ(st.stddev[0], 1.0f);
}

// Joint statistics over inputs and targets, independently accumulated.
TEST(NormStats, MatchesDirectComputation) {
  Gen gen(7);
  const int m = 4;
  const WindowSet ws = MakeWindows(gen.Spec(20, m), 3, Regime::kPredictNext);
  const NormStats st = FitNormStats(ws);
  for (int j = 0; j < m; ++j) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < ws.size(); ++i) {
      for (int f = 0; f < 2; ++f) v.push_back(ws.inputs(i, f * m + j));
      v.push_back(ws.targets(i, j));
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    EXPECT_NEAR(st.mean[j], mean, 1e-5);
    EXPECT_NEAR(st.stddev[j], std::sqrt(var), 1e-5);
  }
}

TEST(NormStats, NeedsTwoWindows) {
  Gen gen(8);
  EXPECT_ASD_ERROR(FitNormStats(MakeWindows(gen.Spec(3, 2), 3, Regime::kReconstructAll)),
                   ErrorCode::kEmptyData);
}

TEST(ApplyNorm, IdentityStats) {
  Gen gen(9);
  const WindowSet ws = MakeWindows(gen.Spec(10, 4), 3, Regime::kInterpolateCenter);
  const WindowSet out = ApplyNorm(ws, NormStats::Identity(4));
  EXPECT_EQ(out.inputs, ws.inputs);
  EXPECT_EQ(out.targets, ws.targets);
  ASSERT_TRUE(out.norm_stats.has_value());
}

TEST(ApplyNorm, TrainingSetBecomesZeroMean) {
  Gen gen(10);
  const WindowSet ws = MakeWindows(gen.Spec(50, 5, 3.0, 9.0), 5, Regime::kReconstructAll);
  const WindowSet out = ApplyNorm(ws, FitNormStats(ws));
  for (int j = 0; j < 5; ++j) {
    double mean = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      for (int f = 0; f < 5; ++f) {
        mean += out.inputs(i, f * 5 + j);
        ++count;
      }
    }
    EXPECT_LT(std::abs(mean / count), 1e-6);
  }
}

TEST(ApplyNorm, RoundTripAndTrainingStatsAtScoreTime) {
  Gen gen(11);
  const WindowSet train = MakeWindows(gen.Spec(30, 6), 5, Regime::kInterpolateCenter);
  const WindowSet test = MakeWindows(gen.Spec(30, 6, 0.0, 20.0), 5, Regime::kInterpolateCenter);
  const NormStats train_stats = FitNormStats(train);
  const NormStats test_stats = FitNormStats(test);
  const WindowSet normed = ApplyNorm(test, train_stats);
  EXPECT_EQ(normed.norm_stats->mean, train_stats.mean);
  EXPECT_NE(normed.inputs, ApplyNorm(test, test_stats).inputs);
  const WindowSet back = InvertNorm(normed);
  EXPECT_LT((back.inputs - test.inputs).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LT((back.targets - test.targets).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(ApplyNorm, DimensionMismatch) {
  Gen gen(12);
  EXPECT_ASD_ERROR(ApplyNorm(MakeWindows(gen.Spec(6, 4), 3, Regime::kPredictNext), NormStats::Identity(5)),
                   ErrorCode::kDimensionMismatch);
}

TEST(WindowSetBlob, RoundTrip) {
  Gen gen(13);
  const WindowSet ws = MakeWindows(gen.Spec(12, 7), 3, Regime::kInterpolateCenter);
  std::stringstream buf;
  WriteWindowSet(buf, ws);
  EXPECT_EQ(buf.str().size(), 16 + sizeof(float) * static_cast<std::size_t>(ws.inputs.size() + ws.targets.size()));
  const WindowSet back = ReadWindowSet(buf);
  EXPECT_EQ(back.regime, ws.regime);
  EXPECT_EQ(back.n, 3);
  EXPECT_EQ(back.n_mels, 7);
  EXPECT_EQ(back.inputs, ws.inputs);
  EXPECT_EQ(back.targets, ws.targets);
  std::stringstream bad(buf.str().substr(0, 40));
  EXPECT_ASD_ERROR(ReadWindowSet(bad), ErrorCode::kFormat);
}

}  // namespace
}  // namespace asd
