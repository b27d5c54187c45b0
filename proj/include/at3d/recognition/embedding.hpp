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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "at3d/core/image.hpp"
#include "at3d/core/types.hpp"

namespace at3d::recognition {

enum class Architecture { kA, kB };

const char* architecture_name(Architecture arch);
Architecture parse_architecture(const std::string& name);  // "A" or "B"

// Square kernel, "same"-style zero padding of kernel / 2, followed by tanh.
struct ConvLayer {
  int kernel = 3;
  int stride = 1;
  int in_channels = 3;
  int out_channels = 8;
};

inline constexpr int kEmbeddingDim = 128;

// Toy face-embedding network:
//   x / 255 -> [conv -> tanh]* -> global average pool -> linear (-> 128)
//   -> L2 normalization.
// Weights are one flat array: for each conv layer W[out][in][ky][kx] then
// b[out]; then the linear layer W[128][C] and b[128].
struct EmbeddingModel {
  Architecture architecture = Architecture::kA;
  std::uint64_t seed = 0;
  int input_width = 112;
  int input_height = 112;
  std::vector<ConvLayer> layers;
  int embedding_dim = kEmbeddingDim;
  std::vector<double> weights;

  std::size_t expected_weight_count() const;
};

// Architecture A: 3x3/s2/8 -> 3x3/s2/16 -> 3x3/s2/32.
// Architecture B: 5x5/s2/12 -> 3x3/s2/16 -> 3x3/s1/24 -> 3x3/s2/32.
// Weights are Gaussian with per-layer fan-in scaling drawn from `seed`.
EmbeddingModel build_toy_model(Architecture arch, std::uint64_t seed,
                               int input_width = 112, int input_height = 112);

// Per-layer activations kept for the backward pass.
struct EmbeddingCache {
  const EmbeddingModel* model = nullptr;
  std::vector<std::vector<double>> activations;  // CHW; [0] is the scaled input
  std::vector<int> heights;
  std::vector<int> widths;
  VectorX pooled;
  VectorX pre_norm;
  VectorX embedding;
};

struct Embedding {
  VectorX vector;  // unit norm
  EmbeddingCache cache;
};

// Throws kDimensionMismatch when the image does not match the input spec.
Embedding embed(const EmbeddingModel& model, const Image& image);

// Reverse-mode gradient of the embedding with respect to the input image (in
// [0, 255] units). Throws kCacheMismatch for a cache from another model.
Image embed_backward(const EmbeddingModel& model, const EmbeddingCache& cache,
                     const VectorX& dL_dembedding);

// Little-endian container, see serialization.cpp.
void save_embedding_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_embedding_model(const std::string& path);

}  // namespace at3d::recognition
