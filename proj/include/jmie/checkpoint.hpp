// Copyright 2026 The JMIE Authors.
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

#ifndef JMIE_CHECKPOINT_HPP_
#define JMIE_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include "jmie/tensor.hpp"

namespace jmie::ad {

// "JCKP1" layout, little-endian:
//   magic "JCKP1", version u32, tensor count u32, then per tensor
//   name length u16, UTF-8 name, rank u8, dims u32 each, float32 data.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const ParameterSet& params);
void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path);

// Loads into an existing set: every stored tensor must exist with the same
// shape, and every parameter must be present in the file.
void decode_checkpoint(const std::string& bytes, ParameterSet& params);
void load_checkpoint(const std::filesystem::path& path, ParameterSet& params);

}  // namespace jmie::ad

#endif  // JMIE_CHECKPOINT_HPP_
