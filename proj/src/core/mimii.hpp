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

#ifndef ASD_CORE_MIMII_HPP_
#define ASD_CORE_MIMII_HPP_

#include <cstddef>
#include <filesystem>
#include <string_view>

#include "core/manifest.hpp"

namespace asd {

// Reader for a MIMII-style tree:
//
//   <root>/<snr dir>/<machine type>/<machine id>/{normal,abnormal}/*.wav
//
// where the SNR directory name starts with the SNR in dB ("-6_dB_valve",
// "0dB", "6_dB").
struct SplitRule {
  double train_fraction = 0.8;  // share of normal files assigned to train
  bool per_machine_id = false;  // kind = "<type>.<id>" instead of "<type>"
  bool validate_audio = true;   // probe every file's header
  int expected_sample_rate = 16000;
};

// Throws kFormat if the name carries no leading dB value.
double ParseSnrDirectory(std::string_view name);

// Normal files go to train when the hash of their relative path falls below
// train_fraction; every abnormal file goes to test. Entries are sorted by
// path. Errors: kFileNotFound (no root), kFormat (unexpected layout or bad
// audio), kEmptyData (no wav files).
DatasetManifest ScanCorpus(const std::filesystem::path& root, const SplitRule& rule = {});

struct LabelTotals {
  std::size_t normal = 0;
  std::size_t anomalous = 0;
};
LabelTotals CountLabels(const DatasetManifest& manifest);

}  // namespace asd

#endif  // ASD_CORE_MIMII_HPP_
