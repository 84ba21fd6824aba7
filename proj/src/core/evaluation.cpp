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

#include "core/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "core/error.hpp"
#include "core/fileutil.hpp"
#include "core/seed.hpp"

namespace asd {
namespace {

struct SegmentFeatures {
  std::string id;
  Label label = Label::kNormal;
  Spectrogram spec;
};

struct CellData {
  std::vector<Spectrogram> train;
  std::vector<SegmentFeatures> test;
};

CellData LoadCellFromManifest(const DatasetManifest& manifest, const std::string& machine,
                              double snr_db, const FeatureParams& features) {
  CellData data;
  for (const auto& e : manifest.entries) {
    if (e.kind != machine || e.snr_db != snr_db) continue;
    Spectrogram spec = ExtractLogMel(LoadWav(manifest.Resolve(e)), features);
    if (e.split == Split::kTrain) {
      data.train.push_back(std::move(spec));
    } else {
      data.test.push_back({e.path, e.label, std::move(spec)});
    }
  }
  return data;
}

CellData GenerateCellData(const SynthConfig& synth, const std::string& machine, double snr_db,
                          const FeatureParams& features) {
  CellData data;
  for (LabeledClip& c : GenerateCell(synth, ParseMachineKind(machine), snr_db)) {
    Spectrogram spec = ExtractLogMel(c.clip, features);
    if (c.split == Split::kTrain) {
      data.train.push_back(std::move(spec));
    } else {
      data.test.push_back({c.id, c.label, std::move(spec)});
    }
  }
  return data;
}

double SampleStd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  Require(scores.size() == labels.size(), ErrorCode::kDimensionMismatch,
          "scores and labels differ in length");
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    Require(std::isfinite(scores[i]), ErrorCode::kNonFinite, "score is not finite");
    Require(labels[i] == 0 || labels[i] == 1, ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    positives += labels[i] == 1 ? 1 : 0;
  }
  const std::size_t negatives = scores.size() - positives;
  Require(positives > 0 && negatives > 0, ErrorCode::kSingleClass,
          "AUC needs at least one normal and one anomalous record");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum += mid_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double RocAuc(std::span<const ScoreRecord> records) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(records.size());
  labels.reserve(records.size());
  for (const auto& r : records) {
    scores.push_back(r.score);
    labels.push_back(static_cast<int>(r.label));
  }
  return RocAuc(scores, labels);
}

void WriteScoresCsv(std::ostream& out, std::span<const ScoreRecord> records) {
  out << kScoresHeader << '\n';
  for (const auto& r : records) {
    out << r.segment_id << ',' << static_cast<int>(r.label) << ',' << FormatDouble(r.score) << '\n';
  }
}

std::vector<ScoreRecord> ReadScoresCsv(std::istream& in) {
  std::vector<ScoreRecord> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string_view text = Trim(line);
    if (text.empty()) continue;
    if (first && text == kScoresHeader) {
      first = false;
      continue;
    }
    first = false;
    const auto f = SplitFields(text);
    Require(f.size() == 3, ErrorCode::kFormat, "score row needs 3 fields: " + std::string(text));
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), score);
    Require(ec == std::errc() && ptr == f[2].data() + f[2].size(), ErrorCode::kFormat,
            "bad score: " + f[2]);
    out.push_back({f[0], ParseLabel(f[1]), score});
  }
  return out;
}

double ExperimentResult::MeanAuc(std::string_view model,
                                 std::span<const std::string> machines) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [key, cell] : cells) {
    if (key.model != model) continue;
    if (std::find(machines.begin(), machines.end(), key.machine) == machines.end()) continue;
    for (double a : cell.aucs) {
      sum += a;
      ++count;
    }
  }
  Require(count > 0, ErrorCode::kEmptyData, "no cells for model " + std::string(model));
  return sum / static_cast<double>(count);
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const ProgressFn& progress) {
  Require(config.trials >= 1, ErrorCode::kInvalidArgument, "trial count must be at least 1");
  Require(config.manifest.has_value() != config.synth.has_value(), ErrorCode::kInvalidArgument,
          "experiment needs exactly one data source");
  Require(!config.models.empty(), ErrorCode::kInvalidArgument, "no models selected");

  std::vector<std::string> machines = config.kinds;
  std::vector<double> snrs = config.snrs;
  if (config.manifest) {
    Require(!config.manifest->entries.empty(), ErrorCode::kEmptyData, "manifest is empty");
    if (machines.empty()) machines = config.manifest->Kinds();
    if (snrs.empty()) snrs = config.manifest->Snrs();
  } else {
    if (machines.empty()) {
      for (MachineKind k : config.synth->kinds) machines.emplace_back(MachineKindName(k));
    }
    if (snrs.empty()) snrs = config.synth->snrs;
  }

  struct Job {
    std::string machine;
    double snr_db;
    int trial;
  };
  std::vector<Job> jobs;
  for (int t = 0; t < config.trials; ++t) {
    for (const auto& m : machines) {
      for (double s : snrs) jobs.push_back({m, s, t});
    }
  }
  // aucs[job][model]
  std::vector<std::vector<double>> aucs(jobs.size(), std::vector<double>(config.models.size()));

  // Fixed data does not change between trials; load each cell once.
  std::map<std::pair<std::string, double>, std::shared_ptr<const CellData>> fixed_cache;
  std::mutex cache_mu;
  std::mutex log_mu;
  auto log = [&](const std::string& msg) {
    if (!progress) return;
    std::lock_guard<std::mutex> lock(log_mu);
    progress(msg);
  };

  auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::string where = job.machine + " @ " + FormatSnr(job.snr_db) + " dB, trial " +
                              std::to_string(job.trial + 1);
    std::shared_ptr<const CellData> data;
    if (config.manifest) {
      std::lock_guard<std::mutex> lock(cache_mu);
      auto& slot = fixed_cache[{job.machine, job.snr_db}];
      if (!slot) {
        slot = std::make_shared<const CellData>(
            LoadCellFromManifest(*config.manifest, job.machine, job.snr_db, config.features));
      }
      data = slot;
    } else {
      SynthConfig synth = *config.synth;
      // Trial 1 reproduces the configured corpus; later trials draw fresh ones.
      if (job.trial > 0) {
        synth.seed = DeriveSeed(synth.seed, {static_cast<std::uint64_t>(job.trial)});
      }
      data = std::make_shared<const CellData>(
          GenerateCellData(synth, job.machine, job.snr_db, config.features));
    }
    Require(!data->train.empty(), ErrorCode::kEmptyData, where + ": no training clips");
    Require(!data->test.empty(), ErrorCode::kEmptyData, where + ": no test clips");

    for (std::size_t m = 0; m < config.models.size(); ++m) {
      const ModelKind kind = config.models[m];
      const std::uint64_t cell_seed =
          DeriveSeed(config.seed, {static_cast<std::uint64_t>(job.trial),
                                   HashString(ModelKindName(kind)), HashString(job.machine),
                                   HashString(FormatSnr(job.snr_db))});
      TrainConfig tc = config.train;
      tc.seed = DeriveSeed(cell_seed, {2});
      tc.kl_weight = config.kl_weight.value_or(DefaultKlWeight(kind));
      TrainedModel model;
      try {
        model = FitModel(kind, config.n, config.features, data->train, tc, DeriveSeed(cell_seed, {1}),
                         config.train_models);
      } catch (const Error& e) {
        throw Error(e.code(), where + ", model " + std::string(ModelKindName(kind)) + ": " + e.what());
      }
      std::vector<ScoreRecord> records;
      records.reserve(data->test.size());
      for (const auto& seg : data->test) {
        records.push_back({seg.id, seg.label, ScoreSegment(model, seg.spec)});
      }
      aucs[j][m] = RocAuc(records);
      log(where + ", " + std::string(ModelKindName(kind)) + ": AUC " + FormatDouble(aucs[j][m]));
    }
  };

  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
          try {
            run_job(j);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = jobs.size();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentResult result;
  result.trials = config.trials;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      CellKey key{std::string(ModelKindName(config.models[m])), jobs[j].machine, jobs[j].snr_db};
      result.cells[key].aucs.push_back(aucs[j][m]);  // jobs are in trial-major order
    }
  }
  for (auto& [key, cell] : result.cells) {
    cell.mean = std::accumulate(cell.aucs.begin(), cell.aucs.end(), 0.0) /
                static_cast<double>(cell.aucs.size());
    cell.stddev = SampleStd(cell.aucs, cell.mean);
  }
  return result;
}

void WriteTrialsCsv(std::ostream& out, const ExperimentResult& result) {
  out << "model,machine,snr_db,trial,auc\n";
  for (const auto& [key, cell] : result.cells) {
    for (std::size_t t = 0; t < cell.aucs.size(); ++t) {
      out << key.model << ',' << key.machine << ',' << FormatSnr(key.snr_db) << ',' << t + 1 << ','
          << FormatDouble(cell.aucs[t]) << '\n';
    }
  }
}

void WriteSummaryCsv(std::ostream& out, const ExperimentResult& result) {
  out << "model,machine,snr_db,trials,mean_auc,std_auc\n";
  for (const auto& [key, cell] : result.cells) {
    out << key.model << ',' << key.machine << ',' << FormatSnr(key.snr_db) << ',' << cell.aucs.size()
        << ',' << FormatDouble(cell.mean) << ',' << FormatDouble(cell.stddev) << '\n';
  }
}

}  // namespace asd
