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

#ifndef ASD_CORE_PIPELINE_HPP_
#define ASD_CORE_PIPELINE_HPP_

#include <iosfwd>

#include "core/config.hpp"

namespace asd {

// Subcommands driven by a flat key/value configuration. The CLI fills the
// configuration from its flags and an optional config file; the same keys
// may be set through the C API. Progress and summaries go to `log`.
// Outputs are written atomically; on error nothing partial remains.
//
// Environment: ASD_DATA_ROOT supplies `data` (and synth's `out`) when unset.
void CmdSynth(const KeyValueConfig& config, std::ostream& log);
void CmdTrain(const KeyValueConfig& config, std::ostream& log);
void CmdScore(const KeyValueConfig& config, std::ostream& log);
void CmdEval(const KeyValueConfig& config, std::ostream& log);
// Throws kThresholdExceeded when any loss kind fails.
void CmdGradcheck(const KeyValueConfig& config, std::ostream& log);

}  // namespace asd

#endif  // ASD_CORE_PIPELINE_HPP_
