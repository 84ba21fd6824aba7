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

#ifndef ASD_CORE_MANIFEST_HPP_
#define ASD_CORE_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace asd {

enum class Label : int { kNormal = 0, kAnomalous = 1 };
enum class Split { kTrain, kTest };

std::string_view LabelName(Label label);
std::string_view SplitName(Split split);
Label ParseLabel(std::string_view s);
Split ParseSplit(std::string_view s);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory, '/'-separated
  std::string kind;
  double snr_db = 0.0;
  Label label = Label::kNormal;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const ManifestEntry& e) const { return base_dir / e.path; }
  // Training split must hold normal clips only.
  void Validate() const;
  // Distinct kinds / SNRs in first-appearance order.
  std::vector<std::string> Kinds() const;
  std::vector<double> Snrs() const;
};

inline constexpr std::string_view kManifestHeader = "path,kind,snr_db,label,split";

void WriteManifestCsv(std::ostream& out, const DatasetManifest& manifest);
void SaveManifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Accepts a CSV file or a directory containing manifest.csv.
DatasetManifest LoadManifest(const std::filesystem::path& path);

// Formats an SNR as it appears in file names and CSVs ("-6", "0", "6").
std::string FormatSnr(double snr_db);

}  // namespace asd

#endif  // ASD_CORE_MANIFEST_HPP_
