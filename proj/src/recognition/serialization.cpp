// Copyright 2026 The AT3D Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>

#include "at3d/core/binary_io.hpp"
#include "at3d/recognition/embedding.hpp"

// Embedding model container, little-endian:
//   char[8] "AT3DEMB1"
//   u32     architecture (0 = A, 1 = B)
//   u64     seed
//   i32     input_height, input_width
//   u32     conv layer count L
//   i32[4L] kernel, stride, in_channels, out_channels per layer
//   u32     embedding_dim
//   u64     weight count W
//   f64[W]  weights (layout documented on EmbeddingModel)

namespace at3d::recognition {

namespace {
constexpr char kMagic[9] = "AT3DEMB1";
}

void save_embedding_model(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "save_embedding_model: cannot open " + path);
  BinaryWriter w(out);
  w.put_magic(kMagic);
  w.put<std::uint32_t>(model.architecture == Architecture::kA ? 0 : 1);
  w.put<std::uint64_t>(model.seed);
  w.put<std::int32_t>(model.input_height);
  w.put<std::int32_t>(model.input_width);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.layers.size()));
  for (const auto& l : model.layers) {
    w.put<std::int32_t>(l.kernel);
    w.put<std::int32_t>(l.stride);
    w.put<std::int32_t>(l.in_channels);
    w.put<std::int32_t>(l.out_channels);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.embedding_dim));
  w.put<std::uint64_t>(model.weights.size());
  w.put_array(model.weights.data(), model.weights.size());
  out.flush();
  require(static_cast<bool>(out), ErrorCode::kIo,
          "save_embedding_model: write failed for " + path);
}

EmbeddingModel load_embedding_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo,
          "load_embedding_model: cannot open " + path);
  BinaryReader r(in, path);
  r.expect_magic(kMagic);
  EmbeddingModel m;
  const auto arch = r.get<std::uint32_t>();
  require(arch <= 1, ErrorCode::kMalformedFile, path + ": unknown architecture");
  m.architecture = arch == 0 ? Architecture::kA : Architecture::kB;
  m.seed = r.get<std::uint64_t>();
  m.input_height = r.get<std::int32_t>();
  m.input_width = r.get<std::int32_t>();
  const auto layers = r.get<std::uint32_t>();
  require(layers >= 1 && layers <= 64, ErrorCode::kMalformedFile,
          path + ": implausible layer count");
  for (std::uint32_t i = 0; i < layers; ++i) {
    ConvLayer l;
    l.kernel = r.get<std::int32_t>();
    l.stride = r.get<std::int32_t>();
    l.in_channels = r.get<std::int32_t>();
    l.out_channels = r.get<std::int32_t>();
    require(l.kernel > 0 && l.stride > 0 && l.in_channels > 0 && l.out_channels > 0,
            ErrorCode::kMalformedFile, path + ": bad layer descriptor");
    m.layers.push_back(l);
  }
  m.embedding_dim = static_cast<int>(r.get<std::uint32_t>());
  const auto count = r.get<std::uint64_t>();
  require(count == m.expected_weight_count(), ErrorCode::kMalformedFile,
          path + ": weight count does not match the architecture");
  m.weights.resize(count);
  r.get_array(m.weights.data(), m.weights.size());
  return m;
}

}  // namespace at3d::recognition
