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

#ifndef ASD_CORE_FILEUTIL_HPP_
#define ASD_CORE_FILEUTIL_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace asd {

// Writes to "<path>.partial" and renames onto path on Commit(). If the
// object is destroyed without Commit() the partial file is removed, so a
// failed command never leaves a truncated output behind.
class AtomicOutputFile {
 public:
  explicit AtomicOutputFile(std::filesystem::path path,
                            std::ios::openmode mode = std::ios::out);
  ~AtomicOutputFile();
  AtomicOutputFile(const AtomicOutputFile&) = delete;
  AtomicOutputFile& operator=(const AtomicOutputFile&) = delete;

  std::ofstream& stream() { return out_; }
  void Commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path partial_;
  std::ofstream out_;
  bool committed_ = false;
};

// Splits on a delimiter without trimming; empty fields are kept.
std::vector<std::string> SplitFields(std::string_view line, char delim = ',');
std::string_view Trim(std::string_view s);

// Shortest decimal that round-trips the double.
std::string FormatDouble(double v);

}  // namespace asd

#endif  // ASD_CORE_FILEUTIL_HPP_
