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

#ifndef ASD_CORE_GRADCHECK_HPP_
#define ASD_CORE_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/neuralnet.hpp"

namespace asd {

enum class LossKind { kMse, kMseKl };

struct GradCheckOptions {
  double step = 1e-4;       // central-difference half width
  double kl_weight = 0.1;   // used by kMseKl
  double denominator_floor = 1e-6;
  // Test hook: perturbs one analytic gradient entry so the check must fail.
  bool corrupt = false;
};

// Maximum over all parameters of |analytic - numeric| / max(|analytic|,
// |numeric|, denominator_floor). Runs in double precision. For kMseKl the
// noise sample is frozen (pass nullptr for the posterior mean).
double GradCheck(const BasicDenseNetwork<double>& net, const Vec<double>& x,
                 const Vec<double>& target, LossKind kind, const Vec<double>* noise,
                 const GradCheckOptions& options = {});

double GradCheck(const DenseNetwork& net, const Eigen::VectorXf& x, const Eigen::VectorXf& target,
                 LossKind kind, const Eigen::VectorXf* noise = nullptr,
                 const GradCheckOptions& options = {});

// Smallest |pre-activation| over every ReLU unit for this input; kinks
// closer than the finite-difference step make the numeric gradient invalid.
double MinReluMargin(const BasicDenseNetwork<double>& net, const Vec<double>& x,
                     const Vec<double>* noise);

struct GradCheckRow {
  std::string loss_kind;  // reconstruct | interpolate | predict | variational
  int networks = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

// Randomized small encoder/decoder networks (same layout as the detectors,
// narrow widths) for each of the four training objectives.
std::vector<GradCheckRow> RunGradCheckSuite(int networks_per_kind, std::uint64_t seed,
                                            double threshold = 1e-4, bool corrupt = false);

}  // namespace asd

#endif  // ASD_CORE_GRADCHECK_HPP_
