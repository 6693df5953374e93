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

#include "jmie/checkpoint.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "jmie/binary_io.hpp"
#include "jmie/error.hpp"

namespace jmie::ad {

namespace {
constexpr std::string_view kMagic = "JCKP1";
}

std::string encode_checkpoint(const ParameterSet& params) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.le<std::uint32_t>(kCheckpointVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    if (p.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::kIo, "parameter name too long");
    }
    w.le<std::uint16_t>(static_cast<std::uint16_t>(p.name.size()));
    w.bytes(p.name);
    w.le<std::uint8_t>(static_cast<std::uint8_t>(p.shape.size()));
    for (std::size_t d : p.shape) w.le<std::uint32_t>(static_cast<std::uint32_t>(d));
    for (double v : p.value) w.f32(static_cast<float>(v));
  }
  return w.take();
}

void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << encode_checkpoint(params);
}

void decode_checkpoint(const std::string& bytes, ParameterSet& params) {
  io::ByteReader r(bytes, "checkpoint");
  if (bytes.size() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw Error(ErrorCode::kBadMagic, "not a JCKP1 checkpoint");
  }
  const auto version = r.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = r.le<std::uint32_t>();
  std::set<std::string> seen;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto name_len = r.le<std::uint16_t>();
    std::string name(r.bytes(name_len));
    const auto rank = r.le<std::uint8_t>();
    Shape shape;
    for (std::uint8_t d = 0; d < rank; ++d) shape.push_back(r.le<std::uint32_t>());
    Parameter* p = params.find(name);
    if (p == nullptr) throw Error(ErrorCode::kShapeMismatch, "unexpected tensor " + name);
    if (p->shape != shape) {
      throw Error(ErrorCode::kShapeMismatch, name + ": stored " + shape_string(shape) +
                                                 ", expected " + shape_string(p->shape));
    }
    for (double& v : p->value) v = static_cast<double>(r.f32());
    seen.insert(name);
  }
  if (!r.done()) throw Error(ErrorCode::kIo, "trailing bytes in checkpoint");
  for (const auto& p : params) {
    if (!seen.count(p.name)) throw Error(ErrorCode::kShapeMismatch, "missing tensor " + p.name);
  }
}

void load_checkpoint(const std::filesystem::path& path, ParameterSet& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  decode_checkpoint(ss.str(), params);
}

}  // namespace jmie::ad
