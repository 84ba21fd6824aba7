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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "core/dsp.hpp"
#include "core/synthgen.hpp"
#include "test_support.hpp"

namespace asd {
namespace {

using testing::Gen;
using testing::TempDir;

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double MedianFrameStep(const AudioClip& clip) {
  const Spectrogram s = ExtractLogMel(clip, FeatureParams{});
  std::vector<double> d;
  for (Eigen::Index t = 1; t < s.frames.rows(); ++t) {
    d.push_back((s.frames.row(t) - s.frames.row(t - 1)).cast<double>().norm());
  }
  return Median(d);
}

double Rms(const AudioClip& c) { return std::sqrt(MeanPower(c)); }

TEST(Synth, LengthAndDeterminism) {
  for (MachineKind kind : kAllMachineKinds) {
    const SoundProfile p = DefaultProfile(kind);
    const AudioClip a = GenClip(p, 10.0, 16000, false, 42);
    EXPECT_EQ(a.size(), 160000U);
    EXPECT_EQ(a.sample_rate, 16000);
    EXPECT_EQ(a.samples, GenClip(p, 10.0, 16000, false, 42).samples);
    EXPECT_NE(a.samples, GenClip(p, 10.0, 16000, false, 43).samples);
    for (float v : a.samples) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(Synth, KindNames) {
  std::set<std::string> names;
  for (MachineKind kind : kAllMachineKinds) {
    names.insert(std::string(MachineKindName(kind)));
    EXPECT_EQ(ParseMachineKind(MachineKindName(kind)), kind);
  }
  EXPECT_EQ(names.size(), 4U);
  EXPECT_TRUE(IsStationaryKind(MachineKind::kStationaryA));
  EXPECT_FALSE(IsStationaryKind(MachineKind::kNonStationaryB));
  EXPECT_ASD_ERROR(ParseMachineKind("toaster"), ErrorCode::kInvalidArgument);
}

TEST(Synth, StationaryProfilesChangeLessBetweenFrames) {
  double stationary = 0.0, nonstationary = 1e300;
  for (MachineKind kind : kAllMachineKinds) {
    const double step = MedianFrameStep(GenClip(DefaultProfile(kind), 10.0, 16000, false, 7));
    if (IsStationaryKind(kind)) {
      stationary = std::max(stationary, step);
    } else {
      nonstationary = std::min(nonstationary, step);
    }
  }
  EXPECT_GE(nonstationary, 5.0 * stationary);
}

TEST(Synth, AnomaliesDifferButKeepLoudness) {
  for (MachineKind kind : kAllMachineKinds) {
    const SoundProfile p = DefaultProfile(kind);
    const AudioClip normal = GenClip(p, 10.0, 16000, false, 11);
    const AudioClip anomalous = GenClip(p, 10.0, 16000, true, 11);
    EXPECT_NE(normal.samples, anomalous.samples) << MachineKindName(kind);
    const double db = 20.0 * std::log10(Rms(anomalous) / Rms(normal));
    EXPECT_LE(std::abs(db), 3.0) << MachineKindName(kind);
  }
}

TEST(Synth, QuietBetweenBursts) {
  const int frame = 1024, hop = 512;
  for (MachineKind kind : {MachineKind::kNonStationaryA, MachineKind::kNonStationaryB}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const RenderedClip r = RenderClip(DefaultProfile(kind), 10.0, 16000, false, seed);
      ASSERT_FALSE(r.bursts.empty());
      std::vector<double> quiet;
      for (std::size_t start = 0; start + frame <= r.clip.size(); start += hop) {
        const std::size_t end = start + frame;
        const bool touches = std::any_of(r.bursts.begin(), r.bursts.end(), [&](const BurstSpan& b) {
          return b.begin < end && start < b.end;
        });
        if (touches) continue;
        double e = 0.0;
        for (std::size_t i = start; i < end; ++i) e += double(r.clip.samples[i]) * r.clip.samples[i];
        quiet.push_back(e / frame);
      }
      ASSERT_GE(quiet.size(), 10U);
      const double floor = Median(quiet);
      std::size_t near = 0;
      for (double e : quiet) near += std::abs(10.0 * std::log10(e / floor)) <= 3.0 ? 1 : 0;
      EXPECT_GE(static_cast<double>(near), 0.9 * static_cast<double>(quiet.size()))
          << MachineKindName(kind) << " seed " << seed;
    }
  }
}

TEST(MixAtSnr, Examples) {
  AudioClip s, n;
  s.samples.assign(1000, 0.5f);
  n.samples.assign(1000, 0.5f);
  EXPECT_NEAR(NoiseScaleForSnr(s, n, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(NoiseScaleForSnr(s, n, 6.0), 0.501187, 1e-6);
  EXPECT_NEAR(NoiseScaleForSnr(s, n, -6.0), 1.995262, 1e-6);
}

TEST(MixAtSnr, AchievesRequestedSnr) {
  Gen gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = static_cast<std::size_t>(gen.Int(100, 5000));
    const AudioClip s = gen.Clip(len, 16000, gen.Uniform(0.01, 1.0));
    const AudioClip n = gen.Clip(len, 16000, gen.Uniform(0.01, 1.0));
    const double snr = gen.Uniform(-20.0, 20.0);
    const AudioClip mix = MixAtSnr(s, n, snr);
    ASSERT_EQ(mix.size(), len);
    double pn = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double d = double(mix.samples[i]) - s.samples[i];
      pn += d * d;
    }
    const double achieved = 10.0 * std::log10(MeanPower(s) / (pn / static_cast<double>(len)));
    EXPECT_NEAR(achieved, snr, 0.01);
  }
}

TEST(MixAtSnr, Errors) {
  AudioClip s, n, zero;
  s.samples.assign(100, 0.1f);
  n.samples.assign(100, 0.2f);
  zero.samples.assign(100, 0.0f);
  EXPECT_ASD_ERROR(MixAtSnr(s, zero, 0.0), ErrorCode::kInvalidArgument);
  EXPECT_ASD_ERROR(MixAtSnr(zero, n, 0.0), ErrorCode::kInvalidArgument);
  AudioClip shorter = n;
  shorter.samples.resize(50);
  EXPECT_ASD_ERROR(MixAtSnr(s, shorter, 0.0), ErrorCode::kDimensionMismatch);
  AudioClip other_rate = n;
  other_rate.sample_rate = 8000;
  EXPECT_ASD_ERROR(MixAtSnr(s, other_rate, 0.0), ErrorCode::kDimensionMismatch);
}

TEST(MakeDataset, LayoutCountsAndSplits) {
  TempDir dir;
  SynthConfig c;
  c.out_dir = dir.path() / "data";
  c.duration_s = 0.1;
  c.seed = 3;
  const DatasetManifest m = MakeDataset(c);
  EXPECT_EQ(m.entries.size(), 4U * 3U * 80U);
  std::size_t wavs = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(c.out_dir)) {
    wavs += e.path().extension() == ".wav" ? 1 : 0;
  }
  EXPECT_EQ(wavs, 960U);
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "manifest.csv"));
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "synth.cfg"));
  std::size_t train = 0, test_anomalous = 0;
  for (const auto& e : m.entries) {
    if (e.split == Split::kTrain) {
      ++train;
      EXPECT_EQ(e.label, Label::kNormal);
    } else if (e.label == Label::kAnomalous) {
      ++test_anomalous;
    }
    EXPECT_TRUE(std::filesystem::exists(m.Resolve(e))) << e.path;
  }
  EXPECT_EQ(train, 480U);
  EXPECT_EQ(test_anomalous, 240U);
  EXPECT_NO_THROW(m.Validate());
}

TEST(MakeDataset, SameSeedSameBytes) {
  TempDir dir;
  SynthConfig c;
  c.kinds = {MachineKind::kNonStationaryB};
  c.snrs = {0.0};
  c.train_normal = 2;
  c.test_normal = 1;
  c.test_anomalous = 1;
  c.duration_s = 0.5;
  c.seed = 8;
  c.out_dir = dir.path() / "a";
  const DatasetManifest a = MakeDataset(c);
  c.out_dir = dir.path() / "b";
  const DatasetManifest b = MakeDataset(c);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(testing::ReadFile(a.Resolve(a.entries[i])), testing::ReadFile(b.Resolve(b.entries[i])));
  }
  EXPECT_EQ(testing::ReadFile(dir.path() / "a" / "manifest.csv"),
            testing::ReadFile(dir.path() / "b" / "manifest.csv"));
  c.seed = 9;
  c.out_dir = dir.path() / "c";
  const DatasetManifest d = MakeDataset(c);
  EXPECT_NE(testing::ReadFile(a.Resolve(a.entries[0])), testing::ReadFile(d.Resolve(d.entries[0])));
}

TEST(MakeDataset, MatchesInMemoryCell) {
  TempDir dir;
  SynthConfig c;
  c.kinds = {MachineKind::kStationaryA};
  c.snrs = {6.0};
  c.train_normal = 1;
  c.test_normal = 1;
  c.test_anomalous = 1;
  c.duration_s = 0.25;
  c.out_dir = dir.path();
  const DatasetManifest m = MakeDataset(c);
  const auto cell = GenerateCell(c, MachineKind::kStationaryA, 6.0);
  ASSERT_EQ(cell.size(), 3U);
  for (const auto& clip : cell) {
    const AudioClip disk = LoadWav(dir.path() / clip.id);
    EXPECT_EQ(disk.samples, clip.clip.samples) << clip.id;
  }
}

TEST(SynthConfig, KeyValueRoundTripAndValidation) {
  SynthConfig c;
  c.kinds = {MachineKind::kNonStationaryA, MachineKind::kStationaryB};
  c.snrs = {-6.0, 6.0};
  c.train_normal = 5;
  c.duration_s = 2.5;
  c.seed = 99;
  const SynthConfig back = SynthConfig::FromKeyValue(c.ToKeyValue());
  EXPECT_EQ(back.kinds, c.kinds);
  EXPECT_EQ(back.snrs, c.snrs);
  EXPECT_EQ(back.train_normal, 5);
  EXPECT_EQ(back.duration_s, 2.5);
  EXPECT_EQ(back.seed, 99U);
  SynthConfig bad = c;
  bad.train_normal = 0;
  EXPECT_ASD_ERROR(bad.Validate(), ErrorCode::kInvalidArgument);
  bad = c;
  bad.kinds.clear();
  EXPECT_ASD_ERROR(bad.Validate(), ErrorCode::kInvalidArgument);
  bad = c;
  bad.duration_s = 0.0;
  EXPECT_ASD_ERROR(bad.Validate(), ErrorCode::kInvalidArgument);
  for (MachineKind kind : kAllMachineKinds) EXPECT_NO_THROW(DefaultProfile(kind).Validate(16000));
  SoundProfile p = DefaultProfile(MachineKind::kStationaryA);
  p.tones.push_back({9000.0, 0.1});
  EXPECT_ASD_ERROR(p.Validate(16000), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace asd
