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

#ifndef ASD_CORE_ERROR_HPP_
#define ASD_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace asd {

// Values mirror asd_status in the public C header; keep them in sync.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kFileNotFound = 2,
  kMalformedHeader = 3,
  kUnsupportedEncoding = 4,
  kDimensionMismatch = 5,
  kTooShort = 6,
  kIo = 7,
  kFormat = 8,
  kEmptyData = 9,
  kNonFinite = 10,
  kSingleClass = 11,
  kThresholdExceeded = 12,
  kInternal = 13,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) Fail(code, what);
}

}  // namespace asd

#endif  // ASD_CORE_ERROR_HPP_
