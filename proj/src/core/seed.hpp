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

#ifndef ASD_CORE_SEED_HPP_
#define ASD_CORE_SEED_HPP_

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace asd {

// splitmix64 finalizer.
constexpr std::uint64_t MixBits(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent child seed from a parent seed and a path of keys.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = MixBits(seed);
  for (std::uint64_t k : keys) s = MixBits(s ^ MixBits(k + 0x632BE59BD9B4E019ULL));
  return s;
}

// FNV-1a, stable across platforms and runs.
constexpr std::uint64_t HashString(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace asd

#endif  // ASD_CORE_SEED_HPP_
