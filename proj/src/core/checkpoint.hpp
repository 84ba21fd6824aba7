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

#ifndef ASD_CORE_CHECKPOINT_HPP_
#define ASD_CORE_CHECKPOINT_HPP_

#include <filesystem>
#include <iosfwd>

#include "core/models.hpp"

namespace asd {

// Flat little-endian checkpoint:
//
//   char[8]  magic "ASDMODEL"
//   u32      format version (1)
//   u32 x 6  regime, variational, n, n_mels, input_dim, output_dim
//   u32 x 3  sample_rate, frame_size, hop_size
//   f64      log floor
//   u32 x 2  layer count, latent index
//   layer*   u32 in_dim, u32 out_dim, u32 activation,
//            f32[out_dim * in_dim] weights (row-major), f32[out_dim] bias
//   u32      variational head present; if 1, mean layer then logvar layer
//   u32      n_mels, f32[n_mels] mean, f32[n_mels] stddev
//
// Loss history is not stored.
inline constexpr char kCheckpointMagic[8] = {'A', 'S', 'D', 'M', 'O', 'D', 'E', 'L'};
inline constexpr unsigned kCheckpointVersion = 1;

void WriteCheckpoint(std::ostream& out, const TrainedModel& model);
TrainedModel ReadCheckpoint(std::istream& in);

void SaveCheckpoint(const std::filesystem::path& path, const TrainedModel& model);
// Errors: kFileNotFound, kFormat.
TrainedModel LoadCheckpoint(const std::filesystem::path& path);

}  // namespace asd

#endif  // ASD_CORE_CHECKPOINT_HPP_
