// Copyright 2026 The QSE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binary model checkpoint. All integers are unsigned little-endian, all reals
// little-endian IEEE-754 binary64.
//
//   offset  size  field
//   0       8     magic "QSECKPT\0"
//   8       4     format version (1)
//   12      4     family: 0 = classical, 1 = hybrid
//   16      8     feature_dim
//   24      8     n_classes
//   32      8     width (qubits for hybrid, hidden units for classical)
//   40      8     depth (0 for classical)
//   48      4     first_rotation: 0 = Y, 1 = Z (0 for classical)
//   52      4     use_skip: 0 or 1 (0 for classical)
//   56      8     n_params
//   64      8*n   parameters in the flat layout of flatten()

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qse/model.hpp"

namespace qse {

inline constexpr std::uint32_t kCheckpointVersion = 1;

using AnyModel = std::variant<ClassicalBaseline, HybridClassifier>;

std::vector<std::uint8_t> encode_checkpoint(const AnyModel& model);
AnyModel decode_checkpoint(std::span<const std::uint8_t> bytes);  // SchemaError on malformed input

void save_checkpoint(const AnyModel& model, const std::filesystem::path& file);
AnyModel load_checkpoint(const std::filesystem::path& file);

std::string family_name(const AnyModel& model);

}  // namespace qse
