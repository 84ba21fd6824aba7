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

// asd: synth | train | score | eval | gradcheck
//
// Every flag maps to a configuration key (dashes become underscores).
// Precedence: flags, then the --config file, then built-in defaults.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asd/asd.h"

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::pair<std::string, CLI::Option*>> switches;
  asd_status (*run)(const asd_config*, asd_log_fn, void*) = nullptr;
};

std::string KeyOf(const std::string& flag) {
  std::string key = flag;
  for (char& ch : key) {
    if (ch == '-') ch = '_';
  }
  return key;
}

void Value(Subcommand& s, const std::string& flag, const std::string& help) {
  const std::string key = KeyOf(flag);
  s.options[key] = s.app->add_option("--" + flag, s.values[key], help);
}

void Switch(Subcommand& s, const std::string& flag, const std::string& help) {
  s.switches.emplace_back(KeyOf(flag), s.app->add_flag("--" + flag, help));
}

void FeatureFlags(Subcommand& s) {
  Value(s, "frame-size", "STFT frame length in samples (1024)");
  Value(s, "hop-size", "STFT hop in samples (512)");
  Value(s, "n-mels", "Mel bands (64)");
  Value(s, "n", "frames per window (5)");
}

void TrainFlags(Subcommand& s) {
  Value(s, "epochs", "training epochs (50)");
  Value(s, "batch-size", "mini-batch size (64)");
  Value(s, "learning-rate", "Adam step size (0.001)");
  Value(s, "kl-weight", "KL weight (vae 0.1, vidnn/vpdnn 0.01)");
}

void DataFlags(Subcommand& s) {
  Value(s, "data", "dataset directory or manifest CSV (default $ASD_DATA_ROOT)");
  Value(s, "corpus", "MIMII-style directory tree instead of --data");
  Value(s, "train-fraction", "share of normal corpus files used for training (0.8)");
  Switch(s, "per-machine-id", "treat each corpus machine id as its own kind");
}

void PrintLine(const char* line, void*) { std::printf("%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised anomalous sound detection by frame reconstruction, interpolation "
               "and prediction."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(asd_version()));

  std::vector<std::unique_ptr<Subcommand>> subs;
  auto add = [&](const char* name, const char* help, auto run) {
    auto s = std::make_unique<Subcommand>();
    s->app = app.add_subcommand(name, help);
    s->app->add_option("--config", s->config_file, "key = value settings file")
        ->check(CLI::ExistingFile);
    s->run = run;
    subs.push_back(std::move(s));
    return subs.back().get();
  };

  Subcommand* synth = add("synth", "generate the synthetic machine-sound corpus", asd_synth);
  Value(*synth, "out", "output directory (default $ASD_DATA_ROOT)");
  Value(*synth, "kinds", "machine kinds (stationary_a,stationary_b,nonstat_a,nonstat_b)");
  Value(*synth, "snrs", "SNRs in dB (-6,0,6)");
  Value(*synth, "train-normal", "training clips per cell (40)");
  Value(*synth, "test-normal", "normal test clips per cell (20)");
  Value(*synth, "test-anomalous", "anomalous test clips per cell (20)");
  Value(*synth, "duration", "clip length in seconds (10)");
  Value(*synth, "sample-rate", "sample rate in Hz (16000)");
  Value(*synth, "seed", "generation seed (0)");

  Subcommand* train = add("train", "train one model and write a checkpoint", asd_train);
  DataFlags(*train);
  Value(*train, "out", "checkpoint path; the loss history goes to <out>.loss.csv");
  Value(*train, "model", "ae | vae | idnn | vidnn | pdnn | vpdnn (idnn)");
  Value(*train, "machine", "restrict to one machine kind");
  Value(*train, "snr", "restrict to one SNR");
  Value(*train, "seed", "initialization and shuffling seed (0)");
  FeatureFlags(*train);
  TrainFlags(*train);

  Subcommand* score = add("score", "score segments with a trained checkpoint", asd_score);
  DataFlags(*score);
  Value(*score, "checkpoint", "model checkpoint");
  Value(*score, "out", "scores CSV (default: standard output)");
  Value(*score, "machine", "restrict to one machine kind");
  Value(*score, "snr", "restrict to one SNR");
  Value(*score, "split", "test | train | all (test)");
  Value(*score, "dump-errors", "wav file (or manifest path) whose per-window errors to export");
  Value(*score, "dump-out", "CSV for --dump-errors");

  Subcommand* eval = add("eval", "run the model comparison over trials", asd_eval);
  DataFlags(*eval);
  Value(*eval, "out", "directory for trials.csv and summary.csv");
  Value(*eval, "models", "comma-separated models (all six)");
  Value(*eval, "kinds", "machine kinds (all in the data)");
  Value(*eval, "snrs", "SNRs (all in the data)");
  Value(*eval, "trials", "independent repetitions (3)");
  Value(*eval, "seed", "master seed (0)");
  Value(*eval, "threads", "worker threads (1)");
  Switch(*eval, "untrained", "score random-init models");
  Value(*eval, "regenerate", "regenerate a synthetic corpus per trial (true)");
  FeatureFlags(*eval);
  TrainFlags(*eval);

  Subcommand* grad = add("gradcheck", "compare analytic and numerical gradients", asd_gradcheck);
  Value(*grad, "nets", "random networks per loss kind (20)");
  Value(*grad, "threshold", "maximum relative error (1e-4)");
  Value(*grad, "seed", "seed (0)");
  Switch(*grad, "corrupt", "perturb the analytic gradient (negative control)");

  CLI11_PARSE(app, argc, argv);

  for (const auto& s : subs) {
    if (!s->app->parsed()) continue;
    asd_config* raw = nullptr;
    if (asd_config_create(&raw) != ASD_OK) {
      std::fprintf(stderr, "error: %s\n", asd_last_error());
      return 1;
    }
    std::unique_ptr<asd_config, void (*)(asd_config*)> config(raw, asd_config_destroy);
    asd_status status = ASD_OK;
    if (!s->config_file.empty()) status = asd_config_load_file(config.get(), s->config_file.c_str());
    for (const auto& [key, opt] : s->options) {
      if (status == ASD_OK && opt->count() > 0) {
        status = asd_config_set(config.get(), key.c_str(), s->values[key].c_str());
      }
    }
    for (const auto& [key, opt] : s->switches) {
      if (status == ASD_OK && opt->count() > 0) status = asd_config_set(config.get(), key.c_str(), "true");
    }
    if (status == ASD_OK) status = s->run(config.get(), PrintLine, nullptr);
    std::fflush(stdout);
    if (status != ASD_OK) {
      std::fprintf(stderr, "error (%s): %s\n", asd_status_name(status), asd_last_error());
      return static_cast<int>(status);
    }
  }
  return 0;
}
