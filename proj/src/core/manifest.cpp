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

#include "core/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <string>

#include "core/error.hpp"
#include "core/fileutil.hpp"

namespace asd {

std::string_view LabelName(Label label) {
  return label == Label::kNormal ? "normal" : "anomalous";
}

std::string_view SplitName(Split split) { return split == Split::kTrain ? "train" : "test"; }

Label ParseLabel(std::string_view s) {
  if (s == "normal" || s == "0") return Label::kNormal;
  if (s == "anomalous" || s == "abnormal" || s == "1") return Label::kAnomalous;
  Fail(ErrorCode::kFormat, "unknown label '" + std::string(s) + "'");
}

Split ParseSplit(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  Fail(ErrorCode::kFormat, "unknown split '" + std::string(s) + "'");
}

void DatasetManifest::Validate() const {
  for (const auto& e : entries) {
    Require(!(e.split == Split::kTrain && e.label == Label::kAnomalous), ErrorCode::kFormat,
            "anomalous clip in the training split: " + e.path);
  }
}

std::vector<std::string> DatasetManifest::Kinds() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (std::find(out.begin(), out.end(), e.kind) == out.end()) out.push_back(e.kind);
  }
  return out;
}

std::vector<double> DatasetManifest::Snrs() const {
  std::vector<double> out;
  for (const auto& e : entries) {
    if (std::find(out.begin(), out.end(), e.snr_db) == out.end()) out.push_back(e.snr_db);
  }
  return out;
}

std::string FormatSnr(double snr_db) { return FormatDouble(snr_db); }

void WriteManifestCsv(std::ostream& out, const DatasetManifest& manifest) {
  out << kManifestHeader << '\n';
  for (const auto& e : manifest.entries) {
    out << e.path << ',' << e.kind << ',' << FormatSnr(e.snr_db) << ',' << LabelName(e.label)
        << ',' << SplitName(e.split) << '\n';
  }
}

void SaveManifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  AtomicOutputFile file(path);
  WriteManifestCsv(file.stream(), manifest);
  file.Commit();
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(file)) file /= "manifest.csv";
  std::ifstream in(file);
  if (!in) Fail(ErrorCode::kFileNotFound, "cannot open manifest " + file.string());

  DatasetManifest manifest;
  manifest.base_dir = file.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (line_no == 1 && text == kManifestHeader) continue;
    const auto fields = SplitFields(text);
    Require(fields.size() == 5, ErrorCode::kFormat,
            file.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    ManifestEntry e;
    e.path = fields[0];
    e.kind = fields[1];
    const auto& snr = fields[2];
    const auto res = std::from_chars(snr.data(), snr.data() + snr.size(), e.snr_db);
    Require(res.ec == std::errc() && res.ptr == snr.data() + snr.size(), ErrorCode::kFormat,
            file.string() + ":" + std::to_string(line_no) + ": bad snr_db '" + snr + "'");
    e.label = ParseLabel(fields[3]);
    e.split = ParseSplit(fields[4]);
    manifest.entries.push_back(std::move(e));
  }
  manifest.Validate();
  return manifest;
}

}  // namespace asd
