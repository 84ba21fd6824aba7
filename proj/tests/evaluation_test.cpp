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

#include "core/evaluation.hpp"
#include "test_support.hpp"

namespace asd {
namespace {

using testing::Gen;

double BruteForceAuc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

// Random instance with both labels and frequent ties.
void RandomInstance(Gen& gen, std::vector<double>& s, std::vector<int>& y) {
  const int n = gen.Int(2, 50);
  s.resize(static_cast<std::size_t>(n));
  y.resize(static_cast<std::size_t>(n));
  const bool coarse = gen.Coin();
  for (int i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(i)] = coarse ? static_cast<double>(gen.Int(0, 5)) : gen.Normal();
    y[static_cast<std::size_t>(i)] = gen.Int(0, 1);
  }
  y[0] = 0;
  y[1] = 1;
}

TEST(RocAuc, Examples) {
  EXPECT_EQ(RocAuc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(RocAuc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}), 0.75);
  EXPECT_EQ(RocAuc(std::vector<double>{2, 2, 2, 2, 2}, std::vector<int>{0, 1, 0, 1, 1}), 0.5);
  const std::vector<ScoreRecord> rec = {{"a", Label::kNormal, 1.0}, {"b", Label::kAnomalous, 0.0}};
  EXPECT_EQ(RocAuc(rec), 0.0);
}

TEST(RocAuc, Errors) {
  EXPECT_ASD_ERROR(RocAuc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), ErrorCode::kSingleClass);
  EXPECT_ASD_ERROR(RocAuc(std::vector<double>{}, std::vector<int>{}), ErrorCode::kSingleClass);
  EXPECT_ASD_ERROR(RocAuc(std::vector<double>{1, NAN}, std::vector<int>{0, 1}), ErrorCode::kNonFinite);
  EXPECT_ASD_ERROR(RocAuc(std::vector<double>{1, 2}, std::vector<int>{0}), ErrorCode::kDimensionMismatch);
  EXPECT_ASD_ERROR(RocAuc(std::vector<double>{1, 2}, std::vector<int>{0, 2}), ErrorCode::kInvalidArgument);
}

TEST(RocAuc, MatchesPairwiseCount) {
  Gen gen(1);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 1000; ++trial) {
    RandomInstance(gen, s, y);
    EXPECT_NEAR(RocAuc(s, y), BruteForceAuc(s, y), 1e-12);
  }
}

TEST(RocAuc, InvariantUnderIncreasingTransform) {
  Gen gen(2);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 200; ++trial) {
    RandomInstance(gen, s, y);
    std::vector<double> t(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) t[i] = std::exp(0.5 * s[i]) * 3.0 - 7.0;
    EXPECT_DOUBLE_EQ(RocAuc(s, y), RocAuc(t, y));
  }
}

TEST(RocAuc, LabelFlipGivesComplement) {
  Gen gen(3);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 200; ++trial) {
    RandomInstance(gen, s, y);
    std::vector<int> flipped(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) flipped[i] = 1 - y[i];
    EXPECT_NEAR(RocAuc(s, flipped), 1.0 - RocAuc(s, y), 1e-12);
  }
}

TEST(RocAuc, RandomScoresSitNearHalf) {
  Gen gen(4);
  double sum = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> s(120);
    std::vector<int> y(120);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = gen.Normal();
      y[i] = i % 2 == 0 ? 1 : 0;
    }
    sum += RocAuc(s, y);
  }
  EXPECT_GE(sum / 3.0, 0.4);
  EXPECT_LE(sum / 3.0, 0.6);
}

TEST(ScoresCsv, RoundTrip) {
  const std::vector<ScoreRecord> rec = {{"x/a.wav", Label::kNormal, 1.25}, {"x/b.wav", Label::kAnomalous, 1e-300}};
  std::stringstream buf;
  WriteScoresCsv(buf, rec);
  EXPECT_EQ(buf.str().substr(0, 22), "segment_id,label,score");
  const auto back = ReadScoresCsv(buf);
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[1].segment_id, "x/b.wav");
  EXPECT_EQ(back[1].label, Label::kAnomalous);
  EXPECT_EQ(back[1].score, 1e-300);
  std::stringstream bad("segment_id,label,score\na,0\n");
  EXPECT_ASD_ERROR(ReadScoresCsv(bad), ErrorCode::kFormat);
}

ExperimentConfig TinyExperiment() {
  ExperimentConfig c;
  c.models = {ModelKind::kAe, ModelKind::kVidnn};
  c.trials = 3;
  c.seed = 17;
  c.train.epochs = 2;
  SynthConfig s;
  s.kinds = {MachineKind::kNonStationaryA};
  s.snrs = {6};
  s.train_normal = 3;
  s.test_normal = 3;
  s.test_anomalous = 3;
  s.duration_s = 1.0;
  s.seed = 5;
  c.synth = s;
  return c;
}

TEST(RunExperiment, TrialCountsAndDeterminism) {
  const ExperimentConfig c = TinyExperiment();
  const ExperimentResult a = RunExperiment(c);
  ASSERT_EQ(a.cells.size(), 2U);
  for (const auto& [key, cell] : a.cells) {
    ASSERT_EQ(cell.aucs.size(), 3U);
    for (double v : cell.aucs) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  const ExperimentResult b = RunExperiment(c);
  std::ostringstream ta, tb, sa, sb;
  WriteTrialsCsv(ta, a);
  WriteTrialsCsv(tb, b);
  WriteSummaryCsv(sa, a);
  WriteSummaryCsv(sb, b);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(ta.str().substr(0, 30), "model,machine,snr_db,trial,auc");
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  ExperimentConfig c = TinyExperiment();
  c.trials = 2;
  const ExperimentResult one = RunExperiment(c);
  c.threads = 3;
  const ExperimentResult many = RunExperiment(c);
  for (const auto& [key, cell] : one.cells) EXPECT_EQ(cell.aucs, many.cells.at(key).aucs);
}

TEST(RunExperiment, SummaryStatistics) {
  const ExperimentResult r = RunExperiment(TinyExperiment());
  for (const auto& [key, cell] : r.cells) {
    const double mean = (cell.aucs[0] + cell.aucs[1] + cell.aucs[2]) / 3.0;
    double ss = 0.0;
    for (double v : cell.aucs) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(cell.mean, mean, 1e-15);
    EXPECT_NEAR(cell.stddev, std::sqrt(ss / 2.0), 1e-15);
  }
  const std::vector<std::string> machines = {"nonstat_a"};
  EXPECT_NEAR(r.MeanAuc("ae", machines), r.cells.begin()->second.mean, 1e-15);
}

TEST(RunExperiment, Errors) {
  ExperimentConfig c = TinyExperiment();
  c.trials = 0;
  EXPECT_ASD_ERROR(RunExperiment(c), ErrorCode::kInvalidArgument);
  c = TinyExperiment();
  c.manifest = DatasetManifest{};
  EXPECT_ASD_ERROR(RunExperiment(c), ErrorCode::kInvalidArgument);
  c = TinyExperiment();
  c.synth->test_anomalous = 0;
  EXPECT_ASD_ERROR(RunExperiment(c), ErrorCode::kSingleClass);
}

}  // namespace
}  // namespace asd
