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

#include "core/mimii.hpp"

#include <algorithm>
#include <charconv>
#include <string>
#include <vector>

#include "core/audio.hpp"
#include "core/error.hpp"
#include "core/seed.hpp"

namespace asd {
namespace fs = std::filesystem;

double ParseSnrDirectory(std::string_view name) {
  double value = 0.0;
  const char* first = name.data();
  const char* last = name.data() + name.size();
  const auto res = std::from_chars(first, last, value);
  Require(res.ec == std::errc() && res.ptr != first, ErrorCode::kFormat,
          "directory '" + std::string(name) + "' does not start with an SNR value");
  std::string_view rest(res.ptr, static_cast<std::size_t>(last - res.ptr));
  if (!rest.empty() && rest.front() == '_') rest.remove_prefix(1);
  Require(rest.size() >= 2 && (rest.substr(0, 2) == "dB" || rest.substr(0, 2) == "db"),
          ErrorCode::kFormat, "directory '" + std::string(name) + "' is not an SNR directory");
  return value;
}

DatasetManifest ScanCorpus(const fs::path& root, const SplitRule& rule) {
  Require(fs::is_directory(root), ErrorCode::kFileNotFound,
          "corpus root " + root.string() + " is not a directory");
  Require(rule.train_fraction >= 0.0 && rule.train_fraction <= 1.0, ErrorCode::kInvalidArgument,
          "train fraction must lie in [0, 1]");

  DatasetManifest manifest;
  manifest.base_dir = root;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".wav") continue;

    const fs::path rel = fs::relative(p, root);
    std::vector<std::string> parts;
    for (const auto& part : rel) parts.push_back(part.string());
    Require(parts.size() == 5, ErrorCode::kFormat,
            rel.generic_string() + ": expected <snr>/<type>/<id>/<normal|abnormal>/<file>.wav");

    ManifestEntry e;
    e.path = rel.generic_string();
    e.snr_db = ParseSnrDirectory(parts[0]);
    e.kind = rule.per_machine_id ? parts[1] + "." + parts[2] : parts[1];
    if (parts[3] == "normal") {
      e.label = Label::kNormal;
    } else if (parts[3] == "abnormal" || parts[3] == "anomalous") {
      e.label = Label::kAnomalous;
    } else {
      Fail(ErrorCode::kFormat, rel.generic_string() + ": label directory must be normal or abnormal");
    }
    if (rule.validate_audio) {
      const WavInfo info = ProbeWav(p);
      Require(info.sample_rate == rule.expected_sample_rate, ErrorCode::kFormat,
              rel.generic_string() + ": sample rate " + std::to_string(info.sample_rate) +
                  " Hz, expected " + std::to_string(rule.expected_sample_rate));
    }
    if (e.label == Label::kAnomalous) {
      e.split = Split::kTest;
    } else {
      const double u = static_cast<double>(MixBits(HashString(e.path)) % 1000000ULL) / 1e6;
      e.split = u < rule.train_fraction ? Split::kTrain : Split::kTest;
    }
    manifest.entries.push_back(std::move(e));
  }
  Require(!manifest.entries.empty(), ErrorCode::kEmptyData,
          "no .wav files under " + root.string());
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  manifest.Validate();
  return manifest;
}

LabelTotals CountLabels(const DatasetManifest& manifest) {
  LabelTotals t;
  for (const auto& e : manifest.entries) {
    (e.label == Label::kNormal ? t.normal : t.anomalous) += 1;
  }
  return t;
}

}  // namespace asd
