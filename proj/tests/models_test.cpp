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
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "core/checkpoint.hpp"
#include "core/models.hpp"
#include "core/neuralnet.hpp"
#include "core/synthgen.hpp"
#include "test_support.hpp"

namespace asd {
namespace {

// Features sized to the spec so narrow test models stay consistent.
TrainedModel Build(const ModelSpec& spec, std::uint64_t seed) {
  FeatureParams f;
  f.n_mels = spec.n_mels;
  return BuildModel(spec, seed, f);
}

using testing::Gen;

std::vector<int> Widths(const DenseNetwork& net) {
  std::vector<int> w = {static_cast<int>(net.input_dim())};
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (i == net.latent_index && net.head) w.push_back(static_cast<int>(net.head->latent_dim()));
    w.push_back(static_cast<int>(net.layers[i].out_dim()));
  }
  return w;
}

void ZeroParameters(DenseNetwork& net) {
  for (auto span : net.ParameterSpans()) std::fill(span.begin(), span.end(), 0.0f);
}

TEST(BuildModel, AeTopologyAndCount) {
  const TrainedModel m = Build(ModelSpec::For(ModelKind::kAe, 5, 64), 1);
  EXPECT_EQ(Widths(m.network), (std::vector<int>{320, 64, 32, 16, 32, 64, 320}));
  EXPECT_EQ(m.network.ParameterCount(), 46608U);
  for (std::size_t i = 0; i + 1 < m.network.layers.size(); ++i) {
    EXPECT_EQ(m.network.layers[i].activation, Activation::kRelu);
  }
  EXPECT_EQ(m.network.layers.back().activation, Activation::kNone);
}

TEST(BuildModel, IdnnAndPdnnCounts) {
  const TrainedModel idnn = Build(ModelSpec::For(ModelKind::kIdnn, 5, 64), 1);
  const TrainedModel pdnn = Build(ModelSpec::For(ModelKind::kPdnn, 5, 64), 1);
  EXPECT_EQ(Widths(idnn.network), (std::vector<int>{256, 64, 32, 16, 32, 64, 64}));
  EXPECT_EQ(idnn.network.ParameterCount(), 25872U);
  EXPECT_EQ(pdnn.network.ParameterCount(), idnn.network.ParameterCount());
  EXPECT_LT(idnn.network.ParameterCount(), 46608U);
}

TEST(BuildModel, VariationalHeadReplacesBottleneck) {
  for (ModelKind k : {ModelKind::kVae, ModelKind::kVidnn, ModelKind::kVpdnn}) {
    const TrainedModel m = Build(ModelSpec::For(k, 5, 64), 2);
    ASSERT_TRUE(m.network.head.has_value());
    EXPECT_EQ(m.network.head->mean_layer.in_dim(), 32);
    EXPECT_EQ(m.network.head->mean_layer.out_dim(), 16);
    EXPECT_EQ(m.network.head->logvar_layer.out_dim(), 16);
    EXPECT_EQ(m.network.head->mean_layer.activation, Activation::kNone);
    EXPECT_EQ(m.network.head->logvar_layer.activation, Activation::kNone);
    const int out = RegimeOf(k) == Regime::kReconstructAll ? 320 : 64;
    EXPECT_EQ(Widths(m.network), (std::vector<int>{out == 320 ? 320 : 256, 64, 32, 16, 32, 64, out}));
    const std::size_t plain = out == 320 ? 46608U : 25872U;
    EXPECT_EQ(m.network.ParameterCount(), plain + 32 * 16 + 16);
  }
}

TEST(BuildModel, OutputWidthFollowsRegime) {
  Gen gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 * gen.Int(1, 4) + 1;
    const int m = gen.Int(1, 80);
    for (ModelKind k : kAllModelKinds) {
      const ModelSpec s = ModelSpec::For(k, n, m);
      EXPECT_EQ(s.output_dim, RegimeOf(k) == Regime::kReconstructAll ? n * m : m);
      EXPECT_EQ(Build(s, 1).network.output_dim(), s.output_dim);
      EXPECT_EQ(s.kind(), k);
    }
  }
}

TEST(ModelKinds, NamesAndKlWeights) {
  for (ModelKind k : kAllModelKinds) EXPECT_EQ(ParseModelKind(ModelKindName(k)), k);
  EXPECT_ASD_ERROR(ParseModelKind("cnn"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(DefaultKlWeight(ModelKind::kVae), 0.1);
  EXPECT_EQ(DefaultKlWeight(ModelKind::kVidnn), 0.01);
  EXPECT_EQ(DefaultKlWeight(ModelKind::kVpdnn), 0.01);
  EXPECT_EQ(DefaultKlWeight(ModelKind::kAe), 0.0);
}

TEST(ScoreWindow, ZeroAndOnes) {
  TrainedModel m = Build(ModelSpec::For(ModelKind::kIdnn, 5, 64), 3);
  ZeroParameters(m.network);
  const std::vector<float> in(256, 0.3f), zeros(64, 0.0f), minus_one(64, -1.0f);
  EXPECT_EQ(ScoreWindow(m, in, zeros), 0.0);
  EXPECT_EQ(ScoreWindow(m, in, minus_one), 64.0);
  EXPECT_ASD_ERROR(ScoreWindow(m, zeros, zeros), ErrorCode::kDimensionMismatch);
}

// Standalone forward pass with explicit loops.
double ReferenceScore(const DenseNetwork& net, const std::vector<double>& x, const std::vector<double>& t) {
  auto affine = [](const DenseLayer& l, const std::vector<double>& v) {
    std::vector<double> out(static_cast<std::size_t>(l.out_dim()));
    for (Eigen::Index r = 0; r < l.out_dim(); ++r) {
      double s = l.bias[r];
      for (Eigen::Index c = 0; c < l.in_dim(); ++c) s += static_cast<double>(l.weights(r, c)) * v[static_cast<std::size_t>(c)];
      if (l.activation == Activation::kRelu && s < 0.0) s = 0.0;
      out[static_cast<std::size_t>(r)] = s;
    }
    return out;
  };
  std::vector<double> h = x;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (i == net.latent_index && net.head) h = affine(net.head->mean_layer, h);
    h = affine(net.layers[i], h);
  }
  double e = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) e += (h[i] - t[i]) * (h[i] - t[i]);
  return e;
}

TEST(ScoreWindow, MatchesStandaloneForward) {
  Gen gen(4);
  for (ModelKind k : kAllModelKinds) {
    TrainedModel m = Build(ModelSpec::For(k, 5, 8), 5);
    for (auto span : m.network.ParameterSpans()) {
      for (float& p : span) p += static_cast<float>(gen.Uniform(-0.1, 0.1));
    }
    std::vector<float> x(static_cast<std::size_t>(m.spec.input_dim)), t(static_cast<std::size_t>(m.spec.output_dim));
    for (float& v : x) v = static_cast<float>(gen.Normal());
    for (float& v : t) v = static_cast<float>(gen.Normal());
    const double ref = ReferenceScore(m.network, {x.begin(), x.end()}, {t.begin(), t.end()});
    EXPECT_NEAR(ScoreWindow(m, x, t), ref, 1e-4 * (1.0 + ref)) << ModelKindName(k);
  }
}

TEST(ScoreSegment, MeanOfWindowScores) {
  TrainedModel m = Build(ModelSpec::For(ModelKind::kIdnn, 3, 1), 6);
  ZeroParameters(m.network);
  m.norm_stats = NormStats::Identity(1);
  Spectrogram s;
  s.n_mels = 1;
  s.frames.resize(4, 1);
  s.frames << 9.0f, static_cast<float>(std::sqrt(2.0)), 2.0f, 9.0f;
  EXPECT_NEAR(ScoreSegment(m, s), 3.0, 1e-6);
  s.frames.setZero();
  EXPECT_EQ(ScoreSegment(m, s), 0.0);
  s.frames.resize(2, 1);
  EXPECT_ASD_ERROR(ScoreSegment(m, s), ErrorCode::kTooShort);
}

TEST(ScoreSegment, DuplicatedWindowsKeepTheMean) {
  Gen gen(7);
  const TrainedModel m = Build(ModelSpec::For(ModelKind::kAe, 5, 16), 7);
  const Spectrogram s = gen.Spec(20, 16);
  const WindowSet ws = ApplyNorm(MakeWindows(s, 5, Regime::kReconstructAll), m.norm_stats);
  const WindowSet twice[] = {ws, ws};
  const auto a = ScoreWindows(m, ws);
  const auto b = ScoreWindows(m, ConcatWindows(twice));
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
  EXPECT_NEAR(ma, mb, 1e-12 * std::abs(ma));
  EXPECT_NEAR(ScoreSegment(m, s), ma, 1e-12 * std::abs(ma));
}

TEST(ScoreSegment, VariationalScoringIsDeterministic) {
  Gen gen(8);
  const TrainedModel m = Build(ModelSpec::For(ModelKind::kVidnn, 5, 16), 8);
  const Spectrogram s = gen.Spec(30, 16);
  EXPECT_EQ(ScoreSegment(m, s), ScoreSegment(m, s));
}

TEST(WindowErrorMatrix, RowsAndConsistencyWithScores) {
  Gen gen(9);
  for (ModelKind k : {ModelKind::kAe, ModelKind::kIdnn}) {
    const TrainedModel m = Build(ModelSpec::For(k, 5, 12), 9);
    const Spectrogram s = gen.Spec(25, 12);
    const RowMatrixD e = WindowErrorMatrix(m, s);
    EXPECT_EQ(e.rows(), 25 - 5 + 1);
    EXPECT_EQ(e.cols(), 12);
    EXPECT_NEAR(e.rowwise().sum().mean(), ScoreSegment(m, s), 1e-6 * ScoreSegment(m, s));
  }
}

WindowSet SingleWindow(const ModelSpec& spec, int copies, std::uint64_t seed) {
  Gen gen(seed);
  const Spectrogram s = gen.Spec(spec.n, spec.n_mels, -1.0, 1.0);
  const WindowSet one = MakeWindows(s, spec.n, spec.regime);
  std::vector<WindowSet> parts(static_cast<std::size_t>(copies), one);
  return ApplyNorm(ConcatWindows(parts), NormStats::Identity(spec.n_mels));
}

TEST(Train, MemorizesASingleWindow) {
  const ModelSpec spec = ModelSpec::For(ModelKind::kAe, 5, 64);
  TrainConfig cfg;
  cfg.epochs = 1500;
  cfg.batch_size = 8;
  cfg.seed = 1;
  const TrainedModel m = Train(Build(spec, 1), SingleWindow(spec, 8, 10), cfg);
  EXPECT_EQ(m.loss_history.size(), 1500U);
  EXPECT_LT(m.loss_history.back(), 1e-3);
}

TEST(Train, DeterministicForSeed) {
  const ModelSpec spec = ModelSpec::For(ModelKind::kVidnn, 5, 8);
  Gen gen(11);
  const WindowSet ws = ApplyNorm(MakeWindows(gen.Spec(80, 8), 5, spec.regime), NormStats::Identity(8));
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.kl_weight = 0.01;
  cfg.seed = 3;
  const TrainedModel a = Train(Build(spec, 2), ws, cfg);
  const TrainedModel b = Train(Build(spec, 2), ws, cfg);
  std::stringstream sa, sb;
  WriteCheckpoint(sa, a);
  WriteCheckpoint(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.loss_history, b.loss_history);
}

// With w = 0 the variational objective is the sampled reconstruction error
// alone: the KL term adds nothing to the loss or the gradients.
TEST(Train, VaeWithZeroKlWeightIsReconstructionOnly) {
  std::mt19937_64 rng(12);
  const ModelSpec spec = ModelSpec::For(ModelKind::kVae, 5, 8);
  const TrainedModel m = Build(spec, 12);
  const Mat<float> x = Mat<float>::Random(40, 7);
  const Mat<float> noise = Mat<float>::Random(16, 7);
  const auto zero = ComputeLossAndGrad<float>(m.network, x, x, 0.0, &noise);
  EXPECT_GT(zero.kl, 0.0);
  EXPECT_DOUBLE_EQ(zero.loss, zero.reconstruction);
  const auto weighted = ComputeLossAndGrad<float>(m.network, x, x, 0.5, &noise);
  EXPECT_NEAR(weighted.loss, weighted.reconstruction + 0.5 * weighted.kl, 1e-9 * weighted.loss);
  // The decoder never sees the KL term.
  const auto& last0 = zero.grad.layers.back().weights;
  const auto& last1 = weighted.grad.layers.back().weights;
  EXPECT_LT((last0 - last1).cwiseAbs().maxCoeff(), 1e-6f);
  EXPECT_GT((zero.grad.head->logvar_layer.weights - weighted.grad.head->logvar_layer.weights).cwiseAbs().maxCoeff(),
            1e-6f);
}

// Same seed: the variational model shares every layer's initial weights with
// the deterministic one except the logvar projection.
TEST(BuildModel, VariationalSharesInitialWeights) {
  const TrainedModel ae = Build(ModelSpec::For(ModelKind::kAe, 5, 16), 21);
  const TrainedModel vae = Build(ModelSpec::For(ModelKind::kVae, 5, 16), 21);
  ASSERT_EQ(ae.network.layers.size(), vae.network.layers.size() + 1);
  EXPECT_EQ(ae.network.layers[0].weights, vae.network.layers[0].weights);
  EXPECT_EQ(ae.network.layers[1].weights, vae.network.layers[1].weights);
  EXPECT_EQ(ae.network.layers[2].weights, vae.network.head->mean_layer.weights);
  for (std::size_t i = 3; i < ae.network.layers.size(); ++i) {
    EXPECT_EQ(ae.network.layers[i].weights, vae.network.layers[i - 1].weights);
  }
}

TEST(Train, Errors) {
  const ModelSpec spec = ModelSpec::For(ModelKind::kIdnn, 5, 8);
  Gen gen(13);
  const WindowSet wrong = ApplyNorm(MakeWindows(gen.Spec(10, 8), 5, Regime::kPredictNext), NormStats::Identity(8));
  EXPECT_ASD_ERROR(Train(Build(spec, 1), wrong, TrainConfig{}), ErrorCode::kDimensionMismatch);
  const WindowSet raw = MakeWindows(gen.Spec(10, 8), 5, Regime::kInterpolateCenter);
  EXPECT_ASD_ERROR(Train(Build(spec, 1), raw, TrainConfig{}), ErrorCode::kInvalidArgument);
  WindowSet empty = ApplyNorm(raw, NormStats::Identity(8));
  empty.inputs.resize(0, empty.inputs.cols());
  empty.targets.resize(0, empty.targets.cols());
  EXPECT_ASD_ERROR(Train(Build(spec, 1), empty, TrainConfig{}), ErrorCode::kEmptyData);
}

// Trained on a steady machine; white-noise spectrograms must score higher.
TEST(Train, TrainingDataScoresBelowWhiteNoise) {
  const SoundProfile profile = DefaultProfile(MachineKind::kStationaryA);
  FeatureParams fp;
  std::vector<Spectrogram> train;
  for (std::uint64_t i = 0; i < 6; ++i) train.push_back(ExtractLogMel(GenClip(profile, 3.0, 16000, false, i), fp));
  Gen gen(14);
  std::vector<Spectrogram> noise;
  for (int i = 0; i < 3; ++i) noise.push_back(ExtractLogMel(gen.Clip(48000, 16000, 0.1), fp));
  TrainConfig cfg;
  cfg.epochs = 15;
  for (ModelKind k : kAllModelKinds) {
    cfg.kl_weight = DefaultKlWeight(k);
    const TrainedModel m = FitModel(k, 5, fp, train, cfg, 6);
    double train_mean = 0.0, noise_mean = 0.0;
    for (const auto& s : train) train_mean += ScoreSegment(m, s) / static_cast<double>(train.size());
    for (const auto& s : noise) noise_mean += ScoreSegment(m, s) / static_cast<double>(noise.size());
    EXPECT_LT(train_mean, noise_mean) << ModelKindName(k);
  }
}

TEST(Checkpoint, RoundTripIsExact) {
  for (ModelKind k : kAllModelKinds) {
    TrainedModel m = Build(ModelSpec::For(k, 5, 64), 15);
    Gen gen(15);
    m.norm_stats.mean = Eigen::VectorXf::Random(64);
    m.norm_stats.stddev = Eigen::VectorXf::Constant(64, 0.7f);
    std::stringstream buf;
    WriteCheckpoint(buf, m);
    const std::string bytes = buf.str();
    const TrainedModel back = ReadCheckpoint(buf);
    EXPECT_EQ(back.spec.kind(), k);
    EXPECT_EQ(back.spec.input_dim, m.spec.input_dim);
    EXPECT_EQ(back.network.ParameterCount(), m.network.ParameterCount());
    EXPECT_EQ(back.norm_stats.mean, m.norm_stats.mean);
    std::stringstream again;
    WriteCheckpoint(again, back);
    EXPECT_EQ(again.str(), bytes);
  }
}

TEST(Checkpoint, RejectsDamage) {
  const TrainedModel m = Build(ModelSpec::For(ModelKind::kAe, 5, 8), 16);
  std::stringstream buf;
  WriteCheckpoint(buf, m);
  std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_ASD_ERROR(ReadCheckpoint(truncated), ErrorCode::kFormat);
  bytes[0] = 'X';
  std::stringstream bad_magic(bytes);
  EXPECT_ASD_ERROR(ReadCheckpoint(bad_magic), ErrorCode::kFormat);
  testing::TempDir dir;
  EXPECT_ASD_ERROR(LoadCheckpoint(dir / "none.bin"), ErrorCode::kFileNotFound);
}

}  // namespace
}  // namespace asd
