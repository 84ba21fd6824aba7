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

#include "asd/asd.h"

#include <cstring>
#include <exception>
#include <new>
#include <ostream>
#include <span>
#include <streambuf>
#include <string>

#include "core/audio.hpp"
#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "core/models.hpp"
#include "core/pipeline.hpp"

struct asd_config {
  asd::KeyValueConfig kv;
};

struct asd_model {
  asd::TrainedModel model;
};

struct asd_spectrogram {
  asd::Spectrogram spec;
};

namespace {

thread_local std::string g_last_error;

static_assert(static_cast<int>(asd::ErrorCode::kInternal) == ASD_ERR_INTERNAL);
static_assert(static_cast<int>(asd::ErrorCode::kThresholdExceeded) == ASD_ERR_THRESHOLD_EXCEEDED);

template <typename F>
asd_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ASD_OK;
  } catch (const asd::Error& e) {
    g_last_error = e.what();
    return static_cast<asd_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ASD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ASD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return ASD_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  asd::Require(p != nullptr, asd::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

// Forwards complete lines to the callback.
class LineBuf : public std::streambuf {
 public:
  LineBuf(asd_log_fn fn, void* user) : fn_(fn), user_(user) {}
  ~LineBuf() override { Flush(); }
  void Flush() {
    if (!line_.empty()) Emit();
  }

 protected:
  int_type overflow(int_type ch) override {
    if (ch == traits_type::eof()) return traits_type::not_eof(ch);
    if (ch == '\n') {
      Emit();
    } else {
      line_.push_back(static_cast<char>(ch));
    }
    return ch;
  }

 private:
  void Emit() {
    if (fn_ != nullptr) fn_(line_.c_str(), user_);
    line_.clear();
  }
  asd_log_fn fn_;
  void* user_;
  std::string line_;
};

using Command = void (*)(const asd::KeyValueConfig&, std::ostream&);

asd_status RunCommand(Command cmd, const asd_config* config, asd_log_fn log, void* user) {
  return Guard([&] {
    NotNull(config, "config");
    LineBuf buf(log, user);
    std::ostream out(&buf);
    cmd(config->kv, out);
    out.flush();
    buf.Flush();
  });
}

}  // namespace

extern "C" {

const char* asd_version(void) { return "1.0.0"; }

const char* asd_status_name(asd_status status) {
  if (status < ASD_OK || status > ASD_ERR_INTERNAL) return "unknown";
  return asd::ErrorCodeName(static_cast<asd::ErrorCode>(status));
}

const char* asd_last_error(void) { return g_last_error.c_str(); }

asd_status asd_config_create(asd_config** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new asd_config();
  });
}

void asd_config_destroy(asd_config* config) { delete config; }

asd_status asd_config_set(asd_config* config, const char* key, const char* value) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(key, "key");
    NotNull(value, "value");
    asd::Require(*key != '\0', asd::ErrorCode::kInvalidArgument, "key is empty");
    config->kv.Set(key, value);
  });
}

asd_status asd_config_load_file(asd_config* config, const char* path) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(path, "path");
    config->kv.LoadFile(path);
  });
}

asd_status asd_config_get(const asd_config* config, const char* key, char* buf, size_t buf_size,
                          size_t* needed) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(key, "key");
    const auto v = config->kv.Get(key);
    asd::Require(v.has_value(), asd::ErrorCode::kInvalidArgument, std::string("unset key ") + key);
    if (needed != nullptr) *needed = v->size() + 1;
    asd::Require(buf != nullptr && buf_size > v->size(), asd::ErrorCode::kInvalidArgument,
                 std::string("buffer too small for ") + key);
    std::memcpy(buf, v->data(), v->size());
    buf[v->size()] = '\0';
  });
}

asd_status asd_synth(const asd_config* c, asd_log_fn log, void* user) {
  return RunCommand(asd::CmdSynth, c, log, user);
}
asd_status asd_train(const asd_config* c, asd_log_fn log, void* user) {
  return RunCommand(asd::CmdTrain, c, log, user);
}
asd_status asd_score(const asd_config* c, asd_log_fn log, void* user) {
  return RunCommand(asd::CmdScore, c, log, user);
}
asd_status asd_eval(const asd_config* c, asd_log_fn log, void* user) {
  return RunCommand(asd::CmdEval, c, log, user);
}
asd_status asd_gradcheck(const asd_config* c, asd_log_fn log, void* user) {
  return RunCommand(asd::CmdGradcheck, c, log, user);
}

asd_status asd_model_load(const char* path, asd_model** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new asd_model{asd::LoadCheckpoint(path)};
  });
}

void asd_model_destroy(asd_model* model) { delete model; }

asd_status asd_model_info_get(const asd_model* model, asd_model_info* out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(out, "out");
    const auto& s = model->model.spec;
    out->regime = static_cast<uint32_t>(s.regime);
    out->variational = s.variational ? 1U : 0U;
    out->n_frames = static_cast<uint32_t>(s.n);
    out->n_mels = static_cast<uint32_t>(s.n_mels);
    out->input_dim = static_cast<uint32_t>(s.input_dim);
    out->output_dim = static_cast<uint32_t>(s.output_dim);
    out->parameter_count = static_cast<uint64_t>(model->model.network.ParameterCount());
  });
}

asd_status asd_model_score(const asd_model* model, const asd_spectrogram* spec, double* out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(spec, "spectrogram");
    NotNull(out, "out");
    *out = asd::ScoreSegment(model->model, spec->spec);
  });
}

asd_status asd_spectrogram_from_wav(const asd_model* model, const char* path,
                                    asd_spectrogram** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new asd_spectrogram{asd::ExtractLogMel(asd::LoadWav(path), model->model.features)};
  });
}

asd_status asd_spectrogram_from_samples(const asd_model* model, const float* samples, size_t count,
                                        int sample_rate, asd_spectrogram** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(samples, "samples");
    NotNull(out, "out");
    asd::AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.samples.assign(samples, samples + count);
    asd::ValidateClip(clip);
    *out = new asd_spectrogram{asd::ExtractLogMel(clip, model->model.features)};
  });
}

void asd_spectrogram_destroy(asd_spectrogram* spec) { delete spec; }

asd_status asd_spectrogram_shape(const asd_spectrogram* spec, size_t* frames, size_t* n_mels) {
  return Guard([&] {
    NotNull(spec, "spectrogram");
    if (frames != nullptr) *frames = static_cast<size_t>(spec->spec.frames.rows());
    if (n_mels != nullptr) *n_mels = static_cast<size_t>(spec->spec.frames.cols());
  });
}

asd_status asd_spectrogram_copy(const asd_spectrogram* spec, float* out, size_t count) {
  return Guard([&] {
    NotNull(spec, "spectrogram");
    NotNull(out, "out");
    const auto size = static_cast<size_t>(spec->spec.frames.size());
    asd::Require(count == size, asd::ErrorCode::kDimensionMismatch,
                 "buffer holds " + std::to_string(count) + " values, need " + std::to_string(size));
    std::memcpy(out, spec->spec.frames.data(), size * sizeof(float));
  });
}

asd_status asd_roc_auc(const double* scores, const int* labels, size_t count, double* out) {
  return Guard([&] {
    NotNull(out, "out");
    asd::Require(count == 0 || (scores != nullptr && labels != nullptr),
                 asd::ErrorCode::kInvalidArgument, "scores or labels is null");
    *out = asd::RocAuc(std::span<const double>(scores, count), std::span<const int>(labels, count));
  });
}

}  // extern "C"
