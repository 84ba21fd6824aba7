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

#include "core/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "core/error.hpp"
#include "core/fileutil.hpp"

namespace asd {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void U32(std::uint32_t v) { Raw(&v, sizeof v); }
  void F64(double v) { Raw(&v, sizeof v); }
  void F32(float v) { Raw(&v, sizeof v); }
  void Raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  std::uint32_t U32() {
    std::uint32_t v;
    Raw(&v, sizeof v);
    return v;
  }
  double F64() {
    double v;
    Raw(&v, sizeof v);
    return v;
  }
  float F32() {
    float v;
    Raw(&v, sizeof v);
    return v;
  }
  void Raw(void* p, std::size_t n) {
    if (!in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n))) {
      Fail(ErrorCode::kFormat, "checkpoint is truncated");
    }
  }

 private:
  std::istream& in_;
};

void WriteLayer(Writer& w, const DenseLayer& layer) {
  w.U32(static_cast<std::uint32_t>(layer.in_dim()));
  w.U32(static_cast<std::uint32_t>(layer.out_dim()));
  w.U32(static_cast<std::uint32_t>(layer.activation));
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) w.F32(layer.weights(r, c));
  }
  for (Eigen::Index i = 0; i < layer.bias.size(); ++i) w.F32(layer.bias[i]);
}

DenseLayer ReadLayer(Reader& r) {
  const std::uint32_t in_dim = r.U32();
  const std::uint32_t out_dim = r.U32();
  const std::uint32_t act = r.U32();
  Require(in_dim > 0 && out_dim > 0 && in_dim < (1u << 20) && out_dim < (1u << 20),
          ErrorCode::kFormat, "implausible layer size in checkpoint");
  Require(act <= 1, ErrorCode::kFormat, "unknown activation code " + std::to_string(act));
  DenseLayer layer;
  layer.activation = static_cast<Activation>(act);
  layer.weights.resize(out_dim, in_dim);
  for (Eigen::Index row = 0; row < layer.weights.rows(); ++row) {
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(row, c) = r.F32();
  }
  layer.bias.resize(out_dim);
  for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = r.F32();
  return layer;
}

}  // namespace

void WriteCheckpoint(std::ostream& out, const TrainedModel& model) {
  Writer w(out);
  w.Raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.U32(kCheckpointVersion);
  const ModelSpec& s = model.spec;
  w.U32(static_cast<std::uint32_t>(s.regime));
  w.U32(s.variational ? 1u : 0u);
  w.U32(static_cast<std::uint32_t>(s.n));
  w.U32(static_cast<std::uint32_t>(s.n_mels));
  w.U32(static_cast<std::uint32_t>(s.input_dim));
  w.U32(static_cast<std::uint32_t>(s.output_dim));
  w.U32(static_cast<std::uint32_t>(model.features.sample_rate));
  w.U32(static_cast<std::uint32_t>(model.features.frame_size));
  w.U32(static_cast<std::uint32_t>(model.features.hop_size));
  w.F64(model.features.log_floor);

  const DenseNetwork& net = model.network;
  w.U32(static_cast<std::uint32_t>(net.layers.size()));
  w.U32(static_cast<std::uint32_t>(net.latent_index));
  for (const auto& layer : net.layers) WriteLayer(w, layer);
  w.U32(net.head ? 1u : 0u);
  if (net.head) {
    WriteLayer(w, net.head->mean_layer);
    WriteLayer(w, net.head->logvar_layer);
  }

  const NormStats& ns = model.norm_stats;
  w.U32(static_cast<std::uint32_t>(ns.n_mels()));
  for (Eigen::Index i = 0; i < ns.mean.size(); ++i) w.F32(ns.mean[i]);
  for (Eigen::Index i = 0; i < ns.stddev.size(); ++i) w.F32(ns.stddev[i]);
  if (!out) Fail(ErrorCode::kIo, "failed writing checkpoint");
}

TrainedModel ReadCheckpoint(std::istream& in) {
  Reader r(in);
  char magic[sizeof kCheckpointMagic];
  r.Raw(magic, sizeof magic);
  Require(std::memcmp(magic, kCheckpointMagic, sizeof magic) == 0, ErrorCode::kFormat,
          "not a model checkpoint (bad magic)");
  const std::uint32_t version = r.U32();
  Require(version == kCheckpointVersion, ErrorCode::kFormat,
          "unsupported checkpoint version " + std::to_string(version));

  TrainedModel model;
  ModelSpec& s = model.spec;
  const std::uint32_t regime = r.U32();
  Require(regime <= 2, ErrorCode::kFormat, "unknown regime code " + std::to_string(regime));
  s.regime = static_cast<Regime>(regime);
  s.variational = r.U32() != 0;
  s.n = static_cast<int>(r.U32());
  s.n_mels = static_cast<int>(r.U32());
  s.input_dim = static_cast<int>(r.U32());
  s.output_dim = static_cast<int>(r.U32());
  s.Validate();
  model.features.sample_rate = static_cast<int>(r.U32());
  model.features.frame_size = static_cast<int>(r.U32());
  model.features.hop_size = static_cast<int>(r.U32());
  model.features.log_floor = r.F64();
  model.features.n_mels = s.n_mels;

  const std::uint32_t layers = r.U32();
  Require(layers > 0 && layers < 64, ErrorCode::kFormat, "implausible layer count");
  DenseNetwork& net = model.network;
  net.latent_index = r.U32();
  Require(net.latent_index <= layers, ErrorCode::kFormat, "latent index out of range");
  for (std::uint32_t i = 0; i < layers; ++i) net.layers.push_back(ReadLayer(r));
  if (r.U32() != 0) {
    DenseLayer mean = ReadLayer(r);
    DenseLayer logvar = ReadLayer(r);
    net.head = VariationalHead{std::move(mean), std::move(logvar)};
  }
  Require(net.head.has_value() == s.variational, ErrorCode::kFormat,
          "variational flag disagrees with the stored head");
  net.Validate();
  Require(net.input_dim() == s.input_dim && net.output_dim() == s.output_dim, ErrorCode::kFormat,
          "network widths disagree with the stored model spec");

  const std::uint32_t mels = r.U32();
  Require(static_cast<int>(mels) == s.n_mels, ErrorCode::kFormat,
          "normalization stats cover the wrong number of bands");
  model.norm_stats.mean.resize(mels);
  model.norm_stats.stddev.resize(mels);
  for (std::uint32_t i = 0; i < mels; ++i) model.norm_stats.mean[i] = r.F32();
  for (std::uint32_t i = 0; i < mels; ++i) model.norm_stats.stddev[i] = r.F32();
  return model;
}

void SaveCheckpoint(const std::filesystem::path& path, const TrainedModel& model) {
  AtomicOutputFile file(path, std::ios::binary);
  WriteCheckpoint(file.stream(), model);
  file.Commit();
}

TrainedModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kFileNotFound, "cannot open checkpoint " + path.string());
  return ReadCheckpoint(in);
}

}  // namespace asd
