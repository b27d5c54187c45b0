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

#include "at3d/attack/config.hpp"
#include "at3d/core/image.hpp"
#include "at3d/mesh/patch.hpp"
#include "at3d/morphable/morphable_model.hpp"
#include "at3d/recognition/embedding.hpp"
#include "at3d/render/rasterizer.hpp"

namespace at3d::attack {

struct AttackLoss {
  double loss = 0.0;
  double similarity = 0.0;
  Image gradient;  // dL / dx*
};

// L = similarity for dodging, -similarity for impersonation, with the target
// embedding held constant.
AttackLoss attack_loss(const recognition::EmbeddingModel& model, const Image& x_star,
                       const VectorX& target_embedding, AttackMode mode);
AttackLoss attack_loss(const recognition::EmbeddingModel& model, const Image& x_star,
                       const Image& x_b, AttackMode mode);

// Everything that stays fixed while a patch mesh is optimized: white-box model,
// patch topology, camera (with pose and illumination), the attacker image the
// render is composited onto and the target embedding.
struct Scene {
  const recognition::EmbeddingModel* model = nullptr;
  mesh::PatchTopology patch;
  render::RenderParams params;
  Image attacker_image;
  VectorX target_embedding;
  AttackMode mode = AttackMode::kImpersonate;
};

struct SceneEvaluation {
  double loss = 0.0;
  double similarity = 0.0;
  Image composite;
  render::RenderOutput render;
  VertexMatrix d_positions;  // filled when gradients are requested
  VertexMatrix d_colors;
};

// synthesize-free half of the pipeline: render -> composite -> loss, and
// optionally the backward pass to vertex positions and colours.
SceneEvaluation evaluate_scene(const Scene& scene, const VertexMatrix& positions,
                               const VertexMatrix& colors, bool with_gradients);

// Render parameters for a coefficient set: camera intrinsics from `camera`,
// pose and illumination from the coefficients.
render::RenderParams params_for(const render::RenderParams& camera,
                                const morphable::Coefficients& c);

}  // namespace at3d::attack
