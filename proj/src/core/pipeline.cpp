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

#include "core/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "core/fileutil.hpp"
#include "core/gradcheck.hpp"
#include "core/manifest.hpp"
#include "core/mimii.hpp"
#include "core/models.hpp"
#include "core/seed.hpp"
#include "core/synthgen.hpp"

namespace asd {
namespace {

namespace fs = std::filesystem;

constexpr const char* kDataRootEnv = "ASD_DATA_ROOT";
constexpr const char* kSynthConfigName = "synth.cfg";

std::string DataPath(const KeyValueConfig& c) {
  if (auto v = c.Get("data")) return *v;
  if (const char* env = std::getenv(kDataRootEnv); env != nullptr && *env != '\0') return env;
  return {};
}

std::string RequiredPath(const KeyValueConfig& c, const std::string& key) {
  auto v = c.Get(key);
  Require(v.has_value() && !v->empty(), ErrorCode::kInvalidArgument, "missing required setting '" + key + "'");
  return *v;
}

FeatureParams FeaturesFrom(const KeyValueConfig& c) {
  FeatureParams f;
  f.sample_rate = c.GetInt("sample_rate", f.sample_rate);
  f.frame_size = c.GetInt("frame_size", f.frame_size);
  f.hop_size = c.GetInt("hop_size", f.hop_size);
  f.n_mels = c.GetInt("n_mels", f.n_mels);
  Require(f.frame_size > 0 && f.frame_size % 2 == 0 && f.hop_size > 0 && f.n_mels > 0,
          ErrorCode::kInvalidArgument, "frame_size must be even and positive; hop_size and n_mels positive");
  return f;
}

TrainConfig TrainFrom(const KeyValueConfig& c) {
  TrainConfig t;
  t.epochs = c.GetInt("epochs", t.epochs);
  t.batch_size = c.GetInt("batch_size", t.batch_size);
  t.adam.lr = c.GetDouble("learning_rate", t.adam.lr);
  t.adam.beta1 = c.GetDouble("beta1", t.adam.beta1);
  t.adam.beta2 = c.GetDouble("beta2", t.adam.beta2);
  t.adam.eps = c.GetDouble("epsilon", t.adam.eps);
  Require(t.epochs >= 1 && t.batch_size >= 1, ErrorCode::kInvalidArgument,
          "epochs and batch_size must be at least 1");
  Require(t.adam.lr > 0.0, ErrorCode::kInvalidArgument, "learning_rate must be positive");
  return t;
}

int FramesFrom(const KeyValueConfig& c) {
  const int n = c.GetInt("n", 5);
  Require(n >= 2, ErrorCode::kInvalidArgument, "n must be at least 2");
  return n;
}

// Manifest from `corpus` (MIMII-style tree) or `data` (manifest or dataset
// directory).
DatasetManifest LoadData(const KeyValueConfig& c) {
  if (auto corpus = c.Get("corpus")) {
    SplitRule rule;
    rule.train_fraction = c.GetDouble("train_fraction", rule.train_fraction);
    rule.per_machine_id = c.GetBool("per_machine_id", rule.per_machine_id);
    Require(rule.train_fraction >= 0.0 && rule.train_fraction <= 1.0, ErrorCode::kInvalidArgument,
            "train_fraction must lie in [0, 1]");
    return ScanCorpus(*corpus, rule);
  }
  const std::string data = DataPath(c);
  Require(!data.empty(), ErrorCode::kInvalidArgument,
          std::string("no dataset given (set data, corpus or ") + kDataRootEnv + ")");
  DatasetManifest m = LoadManifest(data);
  m.Validate();
  return m;
}

std::optional<double> SnrFilter(const KeyValueConfig& c) {
  if (!c.Has("snr")) return std::nullopt;
  return c.GetDouble("snr", 0.0);
}

bool Selected(const ManifestEntry& e, const std::optional<std::string>& machine,
              const std::optional<double>& snr) {
  return (!machine || e.kind == *machine) && (!snr || e.snr_db == *snr);
}

}  // namespace

void CmdSynth(const KeyValueConfig& config, std::ostream& log) {
  KeyValueConfig c = config;
  if (!c.Has("out")) {
    if (const char* env = std::getenv(kDataRootEnv); env != nullptr && *env != '\0') c.Set("out", env);
  }
  SynthConfig synth = SynthConfig::FromKeyValue(c);
  Require(!synth.out_dir.empty(), ErrorCode::kInvalidArgument, "missing required setting 'out'");
  const DatasetManifest m = MakeDataset(synth);
  log << "wrote " << m.entries.size() << " clips\n"
      << "manifest: " << (synth.out_dir / "manifest.csv").string() << "\n";
}

void CmdTrain(const KeyValueConfig& c, std::ostream& log) {
  const fs::path out = RequiredPath(c, "out");
  const ModelKind kind = ParseModelKind(c.GetString("model", "idnn"));
  const FeatureParams features = FeaturesFrom(c);
  TrainConfig tc = TrainFrom(c);
  tc.kl_weight = c.GetDouble("kl_weight", DefaultKlWeight(kind));
  const int n = FramesFrom(c);
  const std::uint64_t seed = c.GetUint64("seed", 0);
  tc.seed = DeriveSeed(seed, {2});

  const DatasetManifest m = LoadData(c);
  const auto machine = c.Get("machine");
  const auto snr = SnrFilter(c);
  std::vector<Spectrogram> train;
  for (const auto& e : m.entries) {
    if (e.split != Split::kTrain || !Selected(e, machine, snr)) continue;
    train.push_back(ExtractLogMel(LoadWav(m.Resolve(e)), features));
  }
  Require(!train.empty(), ErrorCode::kEmptyData, "training split is empty for the selected data");
  log << "training " << ModelKindName(kind) << " on " << train.size() << " clips\n";

  const TrainedModel model = FitModel(kind, n, features, train, tc, DeriveSeed(seed, {1}));

  AtomicOutputFile loss(fs::path(out.string() + ".loss.csv"));
  loss.stream() << "epoch,loss\n";
  for (std::size_t i = 0; i < model.loss_history.size(); ++i) {
    loss.stream() << i + 1 << ',' << FormatDouble(model.loss_history[i]) << '\n';
  }
  SaveCheckpoint(out, model);
  loss.Commit();
  log << "final loss " << FormatDouble(model.loss_history.back()) << "\n"
      << "checkpoint: " << out.string() << " (input_dim " << model.spec.input_dim
      << ", output_dim " << model.spec.output_dim << ")\n";
}

void CmdScore(const KeyValueConfig& c, std::ostream& log) {
  const TrainedModel model = LoadCheckpoint(RequiredPath(c, "checkpoint"));
  const bool dumping = c.Has("dump_errors");
  const bool scoring = c.Has("out") || !dumping;

  if (dumping) {
    // The target is a file on disk or a path listed in the manifest.
    fs::path target = c.GetString("dump_errors", "");
    if (!fs::exists(target) && (c.Has("data") || c.Has("corpus") || std::getenv(kDataRootEnv))) {
      const DatasetManifest m = LoadData(c);
      for (const auto& e : m.entries) {
        if (e.path == target.generic_string()) target = m.Resolve(e);
      }
    }
    const Spectrogram spec = ExtractLogMel(LoadWav(target), model.features);
    const RowMatrixD err = WindowErrorMatrix(model, spec);
    AtomicOutputFile out(RequiredPath(c, "dump_out"));
    out.stream() << "window";
    for (Eigen::Index j = 0; j < err.cols(); ++j) out.stream() << ",mel_" << j;
    out.stream() << '\n';
    for (Eigen::Index i = 0; i < err.rows(); ++i) {
      out.stream() << i;
      for (Eigen::Index j = 0; j < err.cols(); ++j) out.stream() << ',' << FormatDouble(err(i, j));
      out.stream() << '\n';
    }
    out.Commit();
    log << "wrote " << err.rows() << " windows of per-band errors\n";
  }
  if (!scoring) return;

  const DatasetManifest m = LoadData(c);
  const auto machine = c.Get("machine");
  const auto snr = SnrFilter(c);
  const std::string split = c.GetString("split", "test");
  Require(split == "test" || split == "train" || split == "all", ErrorCode::kInvalidArgument,
          "split must be test, train or all");
  std::vector<ScoreRecord> records;
  for (const auto& e : m.entries) {
    if (!Selected(e, machine, snr)) continue;
    if (split != "all" && SplitName(e.split) != split) continue;
    const Spectrogram spec = ExtractLogMel(LoadWav(m.Resolve(e)), model.features);
    records.push_back({e.path, e.label, ScoreSegment(model, spec)});
  }
  Require(!records.empty(), ErrorCode::kEmptyData, "no segments selected for scoring");

  if (auto path = c.Get("out")) {
    AtomicOutputFile out(*path);
    WriteScoresCsv(out.stream(), records);
    out.Commit();
  } else {
    WriteScoresCsv(log, records);
  }
  std::size_t anomalous = 0;
  for (const auto& r : records) anomalous += r.label == Label::kAnomalous ? 1 : 0;
  log << "scored " << records.size() << " segments";
  if (anomalous > 0 && anomalous < records.size()) log << ", AUC " << FormatDouble(RocAuc(records));
  log << "\n";
}

void CmdEval(const KeyValueConfig& c, std::ostream& log) {
  const fs::path out_dir = RequiredPath(c, "out");
  ExperimentConfig ec;
  ec.models.clear();
  for (const auto& name : c.GetList("models", {"ae", "vae", "idnn", "vidnn", "pdnn", "vpdnn"})) {
    ec.models.push_back(ParseModelKind(name));
  }
  ec.kinds = c.GetList("kinds", {});
  for (const auto& s : c.GetList("snrs", {})) {
    KeyValueConfig one;
    one.Set("snr", s);
    ec.snrs.push_back(one.GetDouble("snr", 0.0));
  }
  ec.trials = c.GetInt("trials", 3);
  ec.seed = c.GetUint64("seed", 0);
  ec.n = FramesFrom(c);
  ec.features = FeaturesFrom(c);
  ec.train = TrainFrom(c);
  if (c.Has("kl_weight")) ec.kl_weight = c.GetDouble("kl_weight", 0.0);
  ec.train_models = !c.GetBool("untrained", false);
  ec.threads = c.GetInt("threads", 1);

  // A synthetic dataset is regenerated per trial unless disabled.
  const std::string data = DataPath(c);
  const fs::path synth_cfg = data.empty() ? fs::path() : fs::path(data) / kSynthConfigName;
  if (!c.Has("corpus") && !data.empty() && fs::is_regular_file(synth_cfg) &&
      c.GetBool("regenerate", true)) {
    KeyValueConfig kv;
    kv.LoadFile(synth_cfg);
    ec.synth = SynthConfig::FromKeyValue(kv);
    ec.synth->out_dir.clear();
    log << "synthetic data from " << synth_cfg.string() << ", regenerated per trial\n";
  } else {
    ec.manifest = LoadData(c);
  }

  const ExperimentResult result = RunExperiment(ec, [&](const std::string& msg) { log << msg << "\n"; });

  std::error_code err;
  fs::create_directories(out_dir, err);
  Require(!err && fs::is_directory(out_dir), ErrorCode::kIo, "cannot create " + out_dir.string());
  AtomicOutputFile trials(out_dir / "trials.csv");
  AtomicOutputFile summary(out_dir / "summary.csv");
  WriteTrialsCsv(trials.stream(), result);
  WriteSummaryCsv(summary.stream(), result);
  trials.Commit();
  summary.Commit();
  log << "results: " << (out_dir / "trials.csv").string() << ", " << (out_dir / "summary.csv").string()
      << "\n";
}

void CmdGradcheck(const KeyValueConfig& c, std::ostream& log) {
  const int nets = c.GetInt("nets", 20);
  const double threshold = c.GetDouble("threshold", 1e-4);
  Require(nets >= 1, ErrorCode::kInvalidArgument, "nets must be at least 1");
  const auto rows = RunGradCheckSuite(nets, c.GetUint64("seed", 0), threshold, c.GetBool("corrupt", false));
  bool ok = true;
  log << "loss_kind,networks,max_rel_error,passed\n";
  for (const auto& r : rows) {
    log << r.loss_kind << ',' << r.networks << ',' << FormatDouble(r.max_rel_error) << ','
        << (r.passed ? "yes" : "no") << '\n';
    ok = ok && r.passed;
  }
  Require(ok, ErrorCode::kThresholdExceeded,
          "gradient check exceeded relative error " + FormatDouble(threshold));
}

}  // namespace asd
