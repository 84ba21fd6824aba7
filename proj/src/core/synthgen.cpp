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

#include "core/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <system_error>

#include "core/error.hpp"
#include "core/fileutil.hpp"
#include "core/seed.hpp"

namespace asd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t KindIndex(MachineKind kind) {
  return static_cast<std::size_t>(std::find(kAllMachineKinds.begin(), kAllMachineKinds.end(), kind) -
                                  kAllMachineKinds.begin());
}

// Adds a constant-frequency sinusoid using a rotating phasor.
void AddTone(std::vector<double>& out, double freq_hz, double amplitude, double phase,
             int sample_rate) {
  const std::complex<double> step = std::polar(1.0, kTwoPi * freq_hz / sample_rate);
  std::complex<double> z = std::polar(1.0, phase);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += amplitude * z.imag();
    z *= step;
    // Renormalize occasionally; the recurrence drifts in magnitude.
    if ((i & 1023U) == 1023U) z /= std::abs(z);
  }
}

double ClickEnvelope(double t, double length) {
  if (t < 0.0 || t >= length) return 0.0;
  return std::exp(-4.0 * t / length);
}

// Body envelope: 4 ms attack, exponential fall to -12 dB, 6 ms release.
double BodyEnvelope(double t, double length) {
  if (t < 0.0 || t >= length) return 0.0;
  constexpr double kAttack = 0.004, kRelease = 0.006;
  double env = std::exp(-1.4 * t / length);
  if (t < kAttack) env *= t / kAttack;
  if (length - t < kRelease) env *= (length - t) / kRelease;
  return env;
}

double GapGain(double t, double gap_start, double gap_len) {
  if (gap_len <= 0.0) return 1.0;
  constexpr double kRamp = 0.002;
  const double d = std::min(std::abs(t - gap_start), std::abs(t - (gap_start + gap_len)));
  if (t > gap_start && t < gap_start + gap_len) return 0.0;
  return d < kRamp ? d / kRamp : 1.0;
}

AudioClip Normalize(std::vector<double> samples, int sample_rate, std::mt19937_64& rng) {
  double power = 0.0;
  for (double s : samples) power += s * s;
  power /= static_cast<double>(samples.size());
  std::uniform_real_distribution<double> gain_db(-1.0, 1.0);
  const double gain = power > 0.0 ? kClipRms * std::pow(10.0, gain_db(rng) / 20.0) / std::sqrt(power)
                                  : 0.0;
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    clip.samples[i] = static_cast<float>(samples[i] * gain);
  }
  return clip;
}

RenderedClip RenderStationary(const SoundProfile& p, std::size_t n, int sr, bool anomalous,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double detune = 1.0 + (unit(rng) - 0.5) * 0.01;

  std::vector<double> x(n, 0.0);
  double peak = 0.0;
  for (const Tone& t : p.tones) peak = std::max(peak, t.amplitude);
  for (const Tone& t : p.tones) {
    const double f = t.freq_hz * detune;
    double a = t.amplitude;
    if (anomalous && p.anomaly.tilt_db_per_octave != 0.0 && f > p.anomaly.tilt_corner_hz) {
      a *= std::pow(10.0, p.anomaly.tilt_db_per_octave * std::log2(f / p.anomaly.tilt_corner_hz) / 20.0);
    }
    AddTone(x, f, a, kTwoPi * unit(rng), sr);
  }
  if (anomalous) {
    for (const Tone& t : p.anomaly.extra_tones) {
      AddTone(x, t.freq_hz * detune, t.amplitude * peak, kTwoPi * unit(rng), sr);
    }
  }
  for (double& v : x) v += p.noise_level * normal(rng);
  return {Normalize(std::move(x), sr, rng), {}};
}

RenderedClip RenderNonStationary(const SoundProfile& p, std::size_t n, int sr, bool anomalous,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const BurstParams& b = p.burst;
  const AnomalyTransform& an = p.anomaly;
  const double detune = 1.0 + (unit(rng) - 0.5) * 0.01;
  const double period = b.period_s();
  const double duration = static_cast<double>(n) / sr;

  std::vector<double> x(n, 0.0);
  for (double& v : x) v += p.noise_level * normal(rng);

  RenderedClip out;
  const double offset = unit(rng) * period;
  for (int k = 0;; ++k) {
    double onset = offset + k * period + (unit(rng) * 2.0 - 1.0) * b.onset_jitter_s;
    const bool altered = anomalous && unit(rng) < an.affected_fraction;
    double gap_start = 0.0, gap_len = 0.0, click_at = 0.0, ratio = 1.0;
    bool reversed = false;
    if (altered) {
      reversed = an.reverse;
      onset += (unit(rng) * 2.0 - 1.0) * an.timing_jitter_s;
      gap_len = an.dropout_s;
      gap_start = (0.3 + 0.3 * unit(rng)) * b.duration_s;
      click_at = an.click_shift * b.duration_s;
      ratio = an.timbre_ratio;
    }
    // Per-burst draws happen before the range check so the random stream
    // does not depend on where the clip ends.
    std::vector<double> phases(p.tones.size());
    for (double& ph : phases) ph = kTwoPi * unit(rng);
    const double burst_gain = std::pow(10.0, (unit(rng) - 0.5) * 2.0 / 20.0);
    if (onset + b.span_s() >= duration) break;
    if (onset < 0.0) continue;

    const auto begin = static_cast<std::size_t>(onset * sr);
    const auto body_len = static_cast<std::size_t>(b.duration_s * sr);
    const auto click_len = static_cast<std::size_t>(b.click_s * sr);
    const auto span_len = static_cast<std::size_t>(b.span_s() * sr) + 1;
    std::vector<double> burst(span_len, 0.0);
    // Body.
    for (std::size_t i = 0; i < body_len; ++i) {
      const double t = static_cast<double>(i) / sr;
      const double env = BodyEnvelope(t, b.duration_s) * GapGain(t, gap_start, gap_len);
      if (env == 0.0) continue;
      double v = p.body_noise * normal(rng);
      for (std::size_t j = 0; j < p.tones.size(); ++j) {
        // Linear glide: phase is the integral of the rising frequency.
        const double f0 = p.tones[j].freq_hz * detune * ratio;
        const double phase = kTwoPi * f0 * (t + 0.5 * b.glide * t * t / b.duration_s);
        v += p.tones[j].amplitude * std::sin(phase + phases[j]);
      }
      burst[i] += burst_gain * env * v;
    }
    auto add_click = [&](std::size_t at) {
      for (std::size_t i = 0; i < click_len && at + i < span_len; ++i) {
        const double t = static_cast<double>(i) / sr;
        burst[at + i] += burst_gain * b.click_gain * ClickEnvelope(t, b.click_s) * normal(rng);
      }
    };
    add_click(static_cast<std::size_t>(click_at * sr));
    if (b.end_click) add_click(body_len);
    if (reversed) std::reverse(burst.begin(), burst.end());
    for (std::size_t i = 0; i < span_len && begin + i < n; ++i) x[begin + i] += burst[i];
    out.bursts.push_back({begin, std::min(n, begin + span_len)});
  }
  out.clip = Normalize(std::move(x), sr, rng);
  return out;
}

}  // namespace

std::string_view MachineKindName(MachineKind kind) {
  switch (kind) {
    case MachineKind::kStationaryA: return "stationary_a";
    case MachineKind::kStationaryB: return "stationary_b";
    case MachineKind::kNonStationaryA: return "nonstat_a";
    case MachineKind::kNonStationaryB: return "nonstat_b";
  }
  return "unknown";
}

MachineKind ParseMachineKind(std::string_view name) {
  for (MachineKind k : kAllMachineKinds) {
    if (MachineKindName(k) == name) return k;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown machine kind '" + std::string(name) +
           "' (expected stationary_a, stationary_b, nonstat_a, nonstat_b)");
}

bool IsStationaryKind(MachineKind kind) {
  return kind == MachineKind::kStationaryA || kind == MachineKind::kStationaryB;
}

void SoundProfile::Validate(int sample_rate) const {
  Require(sample_rate > 0, ErrorCode::kInvalidArgument, "sample rate must be positive");
  Require(!tones.empty(), ErrorCode::kInvalidArgument, "profile has no tonal components");
  const double nyquist = sample_rate / 2.0;
  auto check_tone = [&](const Tone& t, double scale) {
    Require(t.freq_hz > 0.0 && t.freq_hz * scale < nyquist, ErrorCode::kInvalidArgument,
            "tone at " + FormatDouble(t.freq_hz) + " Hz is outside (0, Nyquist)");
  };
  double scale = 1.01;
  if (kind == ProfileKind::kNonStationary) {
    scale *= std::max(1.0, anomaly.timbre_ratio) * (1.0 + std::max(0.0, burst.glide));
  }
  for (const Tone& t : tones) check_tone(t, scale);
  for (const Tone& t : anomaly.extra_tones) check_tone(t, 1.01);
  Require(noise_level >= 0.0 && body_noise >= 0.0, ErrorCode::kInvalidArgument,
          "noise levels must be non-negative");
  if (kind == ProfileKind::kNonStationary) {
    Require(burst.rate_hz > 0.0 && burst.duration_s > 0.0 && burst.click_s > 0.0,
            ErrorCode::kInvalidArgument, "burst rate, duration and click length must be positive");
    Require(burst.span_s() + 2.0 * (burst.onset_jitter_s + anomaly.timing_jitter_s) <
                burst.period_s(),
            ErrorCode::kInvalidArgument, "burst duration must be shorter than the burst period");
    Require(anomaly.affected_fraction >= 0.0 && anomaly.affected_fraction <= 1.0,
            ErrorCode::kInvalidArgument, "affected fraction must lie in [0, 1]");
    Require(anomaly.dropout_s < 0.4 * burst.duration_s && anomaly.click_shift >= 0.0 &&
                anomaly.click_shift < 1.0,
            ErrorCode::kInvalidArgument, "anomaly does not fit inside the burst body");
  }
}

SoundProfile DefaultProfile(MachineKind kind) {
  SoundProfile p;
  switch (kind) {
    case MachineKind::kStationaryA: {
      // Fan-like: dense harmonic series on a 55 Hz fundamental with a
      // blade-pass resonance near 700 Hz.
      p.kind = ProfileKind::kStationary;
      for (int h = 1; h * 55.0 < 7600.0; ++h) {
        const double f = h * 55.0;
        const double resonance = 1.0 + 2.0 * std::exp(-std::pow((f - 700.0) / 250.0, 2.0));
        p.tones.push_back({f, resonance / std::sqrt(static_cast<double>(h))});
      }
      p.noise_level = 1e-3;
      p.anomaly.description = "added tone at 2.35 kHz";
      p.anomaly.extra_tones = {{2350.0, 0.25}};
      break;
    }
    case MachineKind::kStationaryB: {
      // Pump-like: 37 Hz fundamental, strong low end, resonance near 1.6 kHz.
      p.kind = ProfileKind::kStationary;
      for (int h = 1; h * 37.0 < 7600.0; ++h) {
        const double f = h * 37.0;
        const double resonance = 1.0 + 1.5 * std::exp(-std::pow((f - 1600.0) / 400.0, 2.0));
        p.tones.push_back({f, resonance / static_cast<double>(h) * 3.0});
      }
      p.noise_level = 1e-3;
      p.anomaly.description = "high-frequency tilt of +3 dB/octave above 1 kHz";
      p.anomaly.tilt_db_per_octave = 3.0;
      p.anomaly.tilt_corner_hz = 1000.0;
      break;
    }
    case MachineKind::kNonStationaryA: {
      // Valve-like: short click-then-ring bursts separated by near silence.
      p.kind = ProfileKind::kNonStationary;
      p.tones = {{1500.0, 1.0}, {3100.0, 0.6}, {4700.0, 0.3}};
      p.noise_level = 2e-3;
      p.body_noise = 0.3;
      p.burst = {.rate_hz = 2.0, .duration_s = 0.13, .onset_jitter_s = 0.1, .click_s = 0.012,
                 .click_gain = 2.5, .glide = 0.0, .end_click = false};
      // Reversal keeps every frame spectrum and changes only their order.
      p.anomaly.description = "occasional burst played backwards";
      p.anomaly.affected_fraction = 0.08;
      p.anomaly.reverse = true;
      break;
    }
    case MachineKind::kNonStationaryB: {
      // Slider-like: longer gliding strokes bounded by start and stop clicks.
      p.kind = ProfileKind::kNonStationary;
      p.tones = {{700.0, 1.0}, {1400.0, 0.5}, {2100.0, 0.3}};
      p.noise_level = 2e-3;
      p.body_noise = 0.2;
      p.burst = {.rate_hz = 0.8, .duration_s = 0.4, .onset_jitter_s = 0.2, .click_s = 0.015,
                 .click_gain = 1.5, .glide = 0.3, .end_click = true};
      p.anomaly.description = "stroke interrupted by a dropout with the click displaced into it";
      p.anomaly.affected_fraction = 0.2;
      p.anomaly.dropout_s = 0.05;
      p.anomaly.click_shift = 0.5;
      break;
    }
  }
  return p;
}

RenderedClip RenderClip(const SoundProfile& profile, double duration_s, int sample_rate,
                        bool anomalous, std::uint64_t seed) {
  Require(duration_s > 0.0, ErrorCode::kInvalidArgument, "duration must be positive");
  profile.Validate(sample_rate);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  Require(n > 0, ErrorCode::kInvalidArgument, "clip would have no samples");
  std::mt19937_64 rng(seed);
  return profile.kind == ProfileKind::kStationary
             ? RenderStationary(profile, n, sample_rate, anomalous, rng)
             : RenderNonStationary(profile, n, sample_rate, anomalous, rng);
}

AudioClip GenClip(const SoundProfile& profile, double duration_s, int sample_rate, bool anomalous,
                  std::uint64_t seed) {
  return RenderClip(profile, duration_s, sample_rate, anomalous, seed).clip;
}

AudioClip BackgroundNoise(std::size_t samples, int sample_rate, std::uint64_t seed) {
  Require(sample_rate > 0, ErrorCode::kInvalidArgument, "sample rate must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(samples);
  double low = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    low = 0.97 * low + 0.25 * normal(rng);
    clip.samples[i] = static_cast<float>(0.1 * (normal(rng) + 0.5 * low));
  }
  return clip;
}

double MeanPower(const AudioClip& clip) {
  if (clip.samples.empty()) return 0.0;
  double sum = 0.0;
  for (float s : clip.samples) sum += static_cast<double>(s) * s;
  return sum / static_cast<double>(clip.samples.size());
}

double NoiseScaleForSnr(const AudioClip& signal, const AudioClip& noise, double snr_db) {
  Require(signal.sample_rate == noise.sample_rate, ErrorCode::kDimensionMismatch,
          "signal and noise sample rates differ");
  Require(signal.size() == noise.size(), ErrorCode::kDimensionMismatch,
          "signal and noise lengths differ");
  Require(std::isfinite(snr_db), ErrorCode::kInvalidArgument, "SNR must be finite");
  const double ps = MeanPower(signal);
  const double pn = MeanPower(noise);
  Require(ps > 0.0, ErrorCode::kInvalidArgument, "signal has zero power");
  Require(pn > 0.0, ErrorCode::kInvalidArgument, "noise has zero power");
  return std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
}

AudioClip MixAtSnr(const AudioClip& signal, const AudioClip& noise, double snr_db) {
  const double g = NoiseScaleForSnr(signal, noise, snr_db);
  AudioClip out;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    out.samples[i] = static_cast<float>(signal.samples[i] + g * noise.samples[i]);
  }
  return out;
}

void SynthConfig::Validate() const {
  Require(!kinds.empty() && !snrs.empty(), ErrorCode::kInvalidArgument,
          "need at least one machine kind and one SNR");
  Require(train_normal >= 1 && test_normal >= 0 && test_anomalous >= 0, ErrorCode::kInvalidArgument,
          "clip counts must be non-negative with at least one training clip");
  Require(duration_s > 0.0 && sample_rate > 0, ErrorCode::kInvalidArgument,
          "duration and sample rate must be positive");
  for (double s : snrs) Require(std::isfinite(s), ErrorCode::kInvalidArgument, "SNR must be finite");
}

KeyValueConfig SynthConfig::ToKeyValue() const {
  KeyValueConfig kv;
  std::string kind_list, snr_list;
  for (MachineKind k : kinds) kind_list += (kind_list.empty() ? "" : ",") + std::string(MachineKindName(k));
  for (double s : snrs) snr_list += (snr_list.empty() ? "" : ",") + FormatSnr(s);
  kv.Set("kinds", kind_list);
  kv.Set("snrs", snr_list);
  kv.Set("train_normal", std::to_string(train_normal));
  kv.Set("test_normal", std::to_string(test_normal));
  kv.Set("test_anomalous", std::to_string(test_anomalous));
  kv.Set("duration", FormatDouble(duration_s));
  kv.Set("sample_rate", std::to_string(sample_rate));
  kv.Set("seed", std::to_string(seed));
  return kv;
}

SynthConfig SynthConfig::FromKeyValue(const KeyValueConfig& kv) {
  SynthConfig c;
  if (kv.Has("out")) c.out_dir = kv.GetString("out", "");
  if (kv.Has("kinds")) {
    c.kinds.clear();
    for (const auto& k : kv.GetList("kinds", {})) c.kinds.push_back(ParseMachineKind(k));
  }
  if (kv.Has("snrs")) {
    c.snrs.clear();
    KeyValueConfig one;
    for (const auto& s : kv.GetList("snrs", {})) {
      one.Set("snr", s);
      c.snrs.push_back(one.GetDouble("snr", 0.0));
    }
  }
  c.train_normal = kv.GetInt("train_normal", c.train_normal);
  c.test_normal = kv.GetInt("test_normal", c.test_normal);
  c.test_anomalous = kv.GetInt("test_anomalous", c.test_anomalous);
  c.duration_s = kv.GetDouble("duration", c.duration_s);
  c.sample_rate = kv.GetInt("sample_rate", c.sample_rate);
  c.seed = kv.GetUint64("seed", c.seed);
  return c;
}

std::vector<LabeledClip> GenerateCell(const SynthConfig& config, MachineKind kind, double snr_db) {
  config.Validate();
  const SoundProfile profile = DefaultProfile(kind);
  struct Group {
    Split split;
    Label label;
    int count;
    std::uint64_t code;
  };
  const Group groups[] = {{Split::kTrain, Label::kNormal, config.train_normal, 1},
                          {Split::kTest, Label::kNormal, config.test_normal, 2},
                          {Split::kTest, Label::kAnomalous, config.test_anomalous, 3}};
  const std::uint64_t kind_key = KindIndex(kind);
  const std::uint64_t snr_key = HashString(FormatSnr(snr_db));
  const std::string dir =
      std::string(MachineKindName(kind)) + "/snr_" + FormatSnr(snr_db) + "/";

  std::vector<LabeledClip> clips;
  for (const Group& g : groups) {
    for (int i = 0; i < g.count; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      // The machine sound is shared across SNRs; only the background differs.
      const std::uint64_t machine_seed = DeriveSeed(config.seed, {kind_key, g.code, idx});
      const std::uint64_t noise_seed = DeriveSeed(config.seed, {kind_key, g.code, idx, snr_key, 7});
      const AudioClip signal = GenClip(profile, config.duration_s, config.sample_rate,
                                       g.label == Label::kAnomalous, machine_seed);
      const AudioClip noise = BackgroundNoise(signal.size(), config.sample_rate, noise_seed);
      char name[64];
      std::snprintf(name, sizeof name, "%s_%s_%04d.wav", std::string(SplitName(g.split)).c_str(),
                    std::string(LabelName(g.label)).c_str(), i);
      LabeledClip c;
      c.id = dir + name;
      c.kind = kind;
      c.snr_db = snr_db;
      c.label = g.label;
      c.split = g.split;
      c.clip = QuantizeTo16Bit(MixAtSnr(signal, noise, snr_db));
      clips.push_back(std::move(c));
    }
  }
  return clips;
}

DatasetManifest MakeDataset(const SynthConfig& config) {
  config.Validate();
  Require(!config.out_dir.empty(), ErrorCode::kInvalidArgument, "no output directory given");
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  Require(!ec && std::filesystem::is_directory(config.out_dir), ErrorCode::kIo,
          "cannot create output directory " + config.out_dir.string());

  DatasetManifest manifest;
  manifest.seed = config.seed;
  manifest.base_dir = config.out_dir;
  std::vector<std::filesystem::path> written;
  try {
    for (MachineKind kind : config.kinds) {
      for (double snr : config.snrs) {
        for (LabeledClip& c : GenerateCell(config, kind, snr)) {
          const std::filesystem::path path = config.out_dir / c.id;
          std::filesystem::create_directories(path.parent_path(), ec);
          Require(!ec, ErrorCode::kIo, "cannot create " + path.parent_path().string());
          written.push_back(path);
          SaveWav(path, c.clip);
          manifest.entries.push_back({c.id, std::string(MachineKindName(kind)), snr, c.label, c.split});
        }
      }
    }
    {
      AtomicOutputFile cfg(config.out_dir / "synth.cfg");
      cfg.stream() << "# synthetic corpus generation settings\n";
      config.ToKeyValue().Write(cfg.stream());
      cfg.Commit();
    }
    written.push_back(config.out_dir / "synth.cfg");
    SaveManifest(config.out_dir / "manifest.csv", manifest);
  } catch (...) {
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
  return manifest;
}

}  // namespace asd
