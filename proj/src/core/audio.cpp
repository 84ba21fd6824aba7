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

#include "core/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "core/error.hpp"

namespace asd {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::int16_t ToPcm16(float v) {
  double scaled = std::nearbyint(static_cast<double>(v) * 32768.0);
  scaled = std::clamp(scaled, -32768.0, 32767.0);
  return static_cast<std::int16_t>(scaled);
}

}  // namespace

void ValidateClip(const AudioClip& clip) {
  Require(clip.sample_rate > 0, ErrorCode::kInvalidArgument,
          "sample rate must be positive");
  for (float s : clip.samples) {
    Require(std::isfinite(s), ErrorCode::kNonFinite, "audio sample is not finite");
  }
}

AudioClip LoadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    Fail(ErrorCode::kMalformedHeader, path.string() + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = data + pos;
    const std::uint32_t chunk_size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + chunk_size > size) {
        Fail(ErrorCode::kMalformedHeader, path.string() + ": truncated fmt chunk");
      }
      format = ReadU16(data + body);
      channels = ReadU16(data + body + 2);
      rate = ReadU32(data + body + 4);
      block_align = ReadU16(data + body + 12);
      bits = ReadU16(data + body + 14);
      if (format == kFormatExtensible) {
        if (chunk_size < 40) {
          Fail(ErrorCode::kMalformedHeader,
               path.string() + ": truncated extensible fmt chunk");
        }
        // First two bytes of the sub-format GUID carry the format tag.
        format = ReadU16(data + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      pcm = data + body;
      // Tolerate writers that leave the size field oversized.
      pcm_bytes = std::min<std::size_t>(chunk_size, size - body);
    }
    pos = body + chunk_size + (chunk_size & 1U);
  }

  if (!have_fmt) Fail(ErrorCode::kMalformedHeader, path.string() + ": missing fmt chunk");
  if (pcm == nullptr) Fail(ErrorCode::kMalformedHeader, path.string() + ": missing data chunk");
  if (format != kFormatPcm) {
    Fail(ErrorCode::kUnsupportedEncoding,
         path.string() + ": format tag " + std::to_string(format) + " is not PCM");
  }
  if (bits != 16) {
    Fail(ErrorCode::kUnsupportedEncoding,
         path.string() + ": " + std::to_string(bits) + "-bit PCM is not supported");
  }
  if (channels == 0 || rate == 0 || block_align != channels * 2) {
    Fail(ErrorCode::kMalformedHeader, path.string() + ": inconsistent fmt fields");
  }

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  const std::size_t frames = pcm_bytes / block_align;
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const auto raw = static_cast<std::int16_t>(ReadU16(pcm + i * block_align));
    clip.samples[i] = static_cast<float>(raw) / 32768.0f;
  }
  return clip;
}

WavInfo ProbeWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  unsigned char head[12];
  if (!in.read(reinterpret_cast<char*>(head), 12) || std::memcmp(head, "RIFF", 4) != 0 ||
      std::memcmp(head + 8, "WAVE", 4) != 0) {
    Fail(ErrorCode::kMalformedHeader, path.string() + ": not a RIFF/WAVE file");
  }
  WavInfo info;
  std::uint16_t format = 0, block_align = 0;
  bool have_fmt = false, have_data = false;
  unsigned char chunk[8];
  while (!have_data && in.read(reinterpret_cast<char*>(chunk), 8)) {
    const std::uint32_t chunk_size = ReadU32(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      unsigned char fmt[40] = {};
      const std::uint32_t take = std::min<std::uint32_t>(chunk_size, sizeof fmt);
      if (chunk_size < 16 || !in.read(reinterpret_cast<char*>(fmt), take)) {
        Fail(ErrorCode::kMalformedHeader, path.string() + ": truncated fmt chunk");
      }
      format = ReadU16(fmt);
      info.channels = ReadU16(fmt + 2);
      info.sample_rate = static_cast<int>(ReadU32(fmt + 4));
      block_align = ReadU16(fmt + 12);
      info.bits_per_sample = ReadU16(fmt + 14);
      if (format == kFormatExtensible && take >= 26) format = ReadU16(fmt + 24);
      in.seekg(static_cast<std::streamoff>(chunk_size - take + (chunk_size & 1U)), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      have_data = true;
      if (block_align > 0) info.frames = chunk_size / block_align;
    } else {
      in.seekg(static_cast<std::streamoff>(chunk_size + (chunk_size & 1U)), std::ios::cur);
    }
  }
  if (!have_fmt) Fail(ErrorCode::kMalformedHeader, path.string() + ": missing fmt chunk");
  if (!have_data) Fail(ErrorCode::kMalformedHeader, path.string() + ": missing data chunk");
  if (format != kFormatPcm) {
    Fail(ErrorCode::kUnsupportedEncoding,
         path.string() + ": format tag " + std::to_string(format) + " is not PCM");
  }
  if (info.bits_per_sample != 16) {
    Fail(ErrorCode::kUnsupportedEncoding,
         path.string() + ": " + std::to_string(info.bits_per_sample) + "-bit PCM is not supported");
  }
  if (info.channels == 0 || info.sample_rate == 0 || block_align != info.channels * 2) {
    Fail(ErrorCode::kMalformedHeader, path.string() + ": inconsistent fmt fields");
  }
  return info;
}

void SaveWav(const std::filesystem::path& path, const AudioClip& clip) {
  Require(clip.sample_rate > 0, ErrorCode::kInvalidArgument,
          "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  for (float s : clip.samples) PutU16(out, static_cast<std::uint16_t>(ToPcm16(s)));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) Fail(ErrorCode::kIo, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) Fail(ErrorCode::kIo, "short write to " + path.string());
}

AudioClip QuantizeTo16Bit(const AudioClip& clip) {
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.resize(clip.samples.size());
  std::transform(clip.samples.begin(), clip.samples.end(), out.samples.begin(),
                 [](float s) { return static_cast<float>(ToPcm16(s)) / 32768.0f; });
  return out;
}

}  // namespace asd
