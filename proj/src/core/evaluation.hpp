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

#ifndef ASD_CORE_EVALUATION_HPP_
#define ASD_CORE_EVALUATION_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/manifest.hpp"
#include "core/models.hpp"
#include "core/synthgen.hpp"

namespace asd {

struct ScoreRecord {
  std::string segment_id;
  Label label = Label::kNormal;
  double score = 0.0;
};

// Mann-Whitney AUC: probability that a random anomalous record outscores a
// random normal one, ties counting one half. Errors: kSingleClass,
// kNonFinite.
double RocAuc(std::span<const ScoreRecord> records);
double RocAuc(std::span<const double> scores, std::span<const int> labels);

inline constexpr const char* kScoresHeader = "segment_id,label,score";
void WriteScoresCsv(std::ostream& out, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> ReadScoresCsv(std::istream& in);

struct ExperimentConfig {
  std::vector<ModelKind> models{kAllModelKinds.begin(), kAllModelKinds.end()};
  std::vector<std::string> kinds;  // empty: every kind in the data source
  std::vector<double> snrs;        // empty: every SNR in the data source
  int trials = 3;
  std::uint64_t seed = 0;
  int n = 5;
  FeatureParams features;
  TrainConfig train;                       // seed and kl_weight are set per cell
  std::optional<double> kl_weight;         // default: DefaultKlWeight(model)
  bool train_models = true;                // false scores random-init networks
  int threads = 1;

  // Exactly one data source. A manifest is fixed across trials. A synthetic
  // source is generated in memory; trial 1 uses its seed and later trials a
  // seed derived from it.
  std::optional<DatasetManifest> manifest;
  std::optional<SynthConfig> synth;
};

struct CellKey {
  std::string model;
  std::string machine;
  double snr_db = 0.0;
  auto operator<=>(const CellKey&) const = default;
};

struct CellResult {
  std::vector<double> aucs;  // one per trial, in trial order
  double mean = 0.0;
  double stddev = 0.0;       // sample standard deviation; 0 for one trial
};

struct ExperimentResult {
  int trials = 0;
  std::map<CellKey, CellResult> cells;

  // Mean over trials and over the matching cells' per-trial AUCs.
  double MeanAuc(std::string_view model, std::span<const std::string> machines) const;
};

using ProgressFn = std::function<void(const std::string&)>;

// For every (machine, snr, trial): build features once, then for each model
// derive a seed from (master seed, trial, model, machine, snr), fit, score
// the test split and compute the AUC. Deterministic for a given config
// regardless of thread count.
ExperimentResult RunExperiment(const ExperimentConfig& config, const ProgressFn& progress = {});

// model,machine,snr_db,trial,auc
void WriteTrialsCsv(std::ostream& out, const ExperimentResult& result);
// model,machine,snr_db,trials,mean_auc,std_auc
void WriteSummaryCsv(std::ostream& out, const ExperimentResult& result);

}  // namespace asd

#endif  // ASD_CORE_EVALUATION_HPP_
