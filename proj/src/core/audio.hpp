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

#ifndef ASD_CORE_AUDIO_HPP_
#define ASD_CORE_AUDIO_HPP_

#include <filesystem>
#include <vector>

namespace asd {

// Mono waveform. Samples are nominally in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws Error if sample_rate <= 0 or any sample is non-finite.
void ValidateClip(const AudioClip& clip);

// Reads a 16-bit PCM RIFF/WAVE file. Multichannel files are reduced to
// channel 0. Samples are scaled by 1/32768.
//
// Errors: kFileNotFound, kMalformedHeader, kUnsupportedEncoding.
AudioClip LoadWav(const std::filesystem::path& path);

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::size_t frames = 0;
};

// Parses only the chunk headers; same error contract as LoadWav.
WavInfo ProbeWav(const std::filesystem::path& path);

// Writes 16-bit PCM mono. Samples are clamped to [-1, 1) before
// quantization.
void SaveWav(const std::filesystem::path& path, const AudioClip& clip);

// Rounds every sample to the nearest 16-bit level, exactly what a
// SaveWav/LoadWav round trip produces.
AudioClip QuantizeTo16Bit(const AudioClip& clip);

}  // namespace asd

#endif  // ASD_CORE_AUDIO_HPP_
