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

#ifndef ASD_CORE_SYNTHGEN_HPP_
#define ASD_CORE_SYNTHGEN_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "core/audio.hpp"
#include "core/config.hpp"
#include "core/manifest.hpp"

namespace asd {

// Synthetic stand-ins for the four machine types: two stationary (fan and
// pump analogues) and two non-stationary (valve and slider analogues).
// The anomalies are synthetic deviations meant to exercise the detectors,
// not models of real mechanical faults.
enum class MachineKind { kStationaryA, kStationaryB, kNonStationaryA, kNonStationaryB };

inline constexpr std::array<MachineKind, 4> kAllMachineKinds = {
    MachineKind::kStationaryA, MachineKind::kStationaryB, MachineKind::kNonStationaryA,
    MachineKind::kNonStationaryB};

std::string_view MachineKindName(MachineKind kind);
MachineKind ParseMachineKind(std::string_view name);
bool IsStationaryKind(MachineKind kind);

enum class ProfileKind { kStationary, kNonStationary };

struct Tone {
  double freq_hz = 0.0;
  double amplitude = 0.0;
};

// Burst layout for non-stationary profiles. Onsets sit on a grid of period
// 1 / rate_hz, each displaced uniformly by up to onset_jitter_s.
struct BurstParams {
  double rate_hz = 0.0;
  double duration_s = 0.0;     // tonal body length
  double onset_jitter_s = 0.0;
  double click_s = 0.0;        // broadband transient at the onset
  double click_gain = 0.0;     // transient amplitude relative to the body
  double glide = 0.0;          // relative pitch rise across the body
  bool end_click = false;      // second transient when the body stops

  double period_s() const { return rate_hz > 0.0 ? 1.0 / rate_hz : 0.0; }
  double span_s() const { return duration_s + (end_click ? click_s : 0.0); }
};

struct AnomalyTransform {
  std::string description;
  // Stationary profiles.
  std::vector<Tone> extra_tones;   // amplitudes relative to the profile tones
  double tilt_db_per_octave = 0.0;  // gain applied to tones above tilt_corner_hz
  double tilt_corner_hz = 1000.0;
  // Non-stationary profiles; applied to affected_fraction of the bursts.
  double affected_fraction = 0.0;
  double dropout_s = 0.0;      // silent gap cut into the body
  double click_shift = 0.0;    // transient moved to this fraction of the body
  double timbre_ratio = 1.0;   // body pitch multiplier
  double timing_jitter_s = 0.0;  // extra onset displacement
  bool reverse = false;        // burst played backwards
};

struct SoundProfile {
  ProfileKind kind = ProfileKind::kStationary;
  std::vector<Tone> tones;
  double noise_level = 0.0;  // broadband floor, relative to unit tone amplitude
  double body_noise = 0.0;   // noise mixed into each burst body (non-stationary)
  BurstParams burst;
  AnomalyTransform anomaly;

  // Throws kInvalidArgument: tones at or above Nyquist, or bursts that do
  // not fit inside their period.
  void Validate(int sample_rate) const;
};

SoundProfile DefaultProfile(MachineKind kind);

// Sample range [begin, end) covered by one burst, transients included.
struct BurstSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct RenderedClip {
  AudioClip clip;
  std::vector<BurstSpan> bursts;  // empty for stationary profiles
};

// Clips are normalized to a fixed RMS (with +-1 dB per-clip gain jitter) so
// loudness never reveals the label.
inline constexpr double kClipRms = 0.05;

RenderedClip RenderClip(const SoundProfile& profile, double duration_s, int sample_rate,
                        bool anomalous, std::uint64_t seed);

AudioClip GenClip(const SoundProfile& profile, double duration_s, int sample_rate,
                  bool anomalous, std::uint64_t seed);

// Gaussian background noise with a gentle low-frequency emphasis.
AudioClip BackgroundNoise(std::size_t samples, int sample_rate, std::uint64_t seed);

// Mean of squared samples.
double MeanPower(const AudioClip& clip);

// signal + g * noise with g chosen so 10 log10(P_signal / (g^2 P_noise))
// equals snr_db. Errors: kDimensionMismatch on rate/length mismatch,
// kInvalidArgument on zero-power inputs.
AudioClip MixAtSnr(const AudioClip& signal, const AudioClip& noise, double snr_db);
double NoiseScaleForSnr(const AudioClip& signal, const AudioClip& noise, double snr_db);

struct SynthConfig {
  std::filesystem::path out_dir;
  std::vector<MachineKind> kinds{kAllMachineKinds.begin(), kAllMachineKinds.end()};
  std::vector<double> snrs{-6.0, 0.0, 6.0};
  int train_normal = 40;
  int test_normal = 20;
  int test_anomalous = 20;
  double duration_s = 10.0;
  int sample_rate = 16000;
  std::uint64_t seed = 0;

  void Validate() const;
  KeyValueConfig ToKeyValue() const;
  // Missing keys keep the defaults above.
  static SynthConfig FromKeyValue(const KeyValueConfig& kv);
};

struct LabeledClip {
  std::string id;  // relative path the clip would have on disk
  MachineKind kind = MachineKind::kStationaryA;
  double snr_db = 0.0;
  Label label = Label::kNormal;
  Split split = Split::kTrain;
  AudioClip clip;  // quantized to 16 bits, as stored
};

// Every clip of one (kind, snr) cell, in memory. Identical to the audio
// MakeDataset writes for the same config.
std::vector<LabeledClip> GenerateCell(const SynthConfig& config, MachineKind kind,
                                      double snr_db);

// Writes <out>/<kind>/snr_<snr>/<split>_<label>_<index>.wav for every cell,
// plus manifest.csv and synth.cfg. Files written before a failure are removed.
DatasetManifest MakeDataset(const SynthConfig& config);

}  // namespace asd

#endif  // ASD_CORE_SYNTHGEN_HPP_
