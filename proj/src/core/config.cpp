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

#include "core/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "core/error.hpp"
#include "core/fileutil.hpp"

namespace asd {
namespace {

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  Require(res.ec == std::errc() && res.ptr == last, ErrorCode::kInvalidArgument,
          "setting '" + key + "': cannot parse '" + text + "' as a number");
  return value;
}

}  // namespace

void KeyValueConfig::Parse(std::istream& in, const std::string& origin) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    Require(eq != std::string_view::npos, ErrorCode::kFormat,
            origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key(Trim(text.substr(0, eq)));
    Require(!key.empty(), ErrorCode::kFormat, origin + ":" + std::to_string(line_no) + ": empty key");
    values_[key] = std::string(Trim(text.substr(eq + 1)));
  }
}

void KeyValueConfig::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kFileNotFound, "cannot open config file " + path.string());
  Parse(in, path.string());
}

void KeyValueConfig::Write(std::ostream& out) const {
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

std::optional<std::string> KeyValueConfig::Get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::GetString(const std::string& key, const std::string& fallback) const {
  return Get(key).value_or(fallback);
}

int KeyValueConfig::GetInt(const std::string& key, int fallback) const {
  const auto v = Get(key);
  return v ? ParseNumber<int>(key, *v) : fallback;
}

double KeyValueConfig::GetDouble(const std::string& key, double fallback) const {
  const auto v = Get(key);
  return v ? ParseNumber<double>(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::GetUint64(const std::string& key, std::uint64_t fallback) const {
  const auto v = Get(key);
  return v ? ParseNumber<std::uint64_t>(key, *v) : fallback;
}

bool KeyValueConfig::GetBool(const std::string& key, bool fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  Fail(ErrorCode::kInvalidArgument, "setting '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<std::string> KeyValueConfig::GetList(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  std::vector<std::string> out;
  for (const auto& item : SplitFields(*v)) {
    const auto t = Trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

}  // namespace asd
