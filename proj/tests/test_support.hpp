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

#ifndef ASD_TESTS_TEST_SUPPORT_HPP_
#define ASD_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "core/audio.hpp"
#include "core/dsp.hpp"
#include "core/error.hpp"

namespace asd::testing {

// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double Uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double Normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  bool Coin() { return Int(0, 1) == 1; }

  std::vector<double> Doubles(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = Uniform(lo, hi);
    return v;
  }

  AudioClip Clip(std::size_t n, int sample_rate = 16000, double amplitude = 0.5) {
    AudioClip c;
    c.sample_rate = sample_rate;
    c.samples.resize(n);
    for (float& s : c.samples) s = static_cast<float>(Uniform(-amplitude, amplitude));
    return c;
  }

  Spectrogram Spec(int frames, int n_mels, double lo = -5.0, double hi = 5.0) {
    Spectrogram s;
    s.frames.resize(frames, n_mels);
    for (Eigen::Index i = 0; i < s.frames.size(); ++i) {
      s.frames.data()[i] = static_cast<float>(Uniform(lo, hi));
    }
    s.n_mels = n_mels;
    return s;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "asd_test";
    if (info != nullptr) name += std::string("_") + info->test_suite_name() + "_" + info->name();
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void WriteFile(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

#define EXPECT_ASD_ERROR(stmt, expected_code)                                  \
  do {                                                                         \
    try {                                                                      \
      stmt;                                                                    \
      ADD_FAILURE() << "expected " << ::asd::ErrorCodeName(expected_code);     \
    } catch (const ::asd::Error& e) {                                          \
      EXPECT_EQ(e.code(), expected_code) << e.what();                          \
    }                                                                          \
  } while (0)

}  // namespace asd::testing

#endif  // ASD_TESTS_TEST_SUPPORT_HPP_
