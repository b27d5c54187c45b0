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

#include "at3d/attack/pipeline.hpp"

#include <cmath>

#include "at3d/core/error.hpp"

namespace at3d::attack {

AttackLoss attack_loss(const recognition::EmbeddingModel& model, const Image& x_star,
                       const VectorX& target, AttackMode mode) {
  recognition::Embedding e = embed(model, x_star);
  require(e.vector.size() == target.size(), ErrorCode::kDimensionMismatch,
          "attack_loss: target embedding has the wrong length");
  const double ne = e.vector.norm();
  const double nt = target.norm();
  require(ne > 0.0 && nt > 0.0, ErrorCode::kInvalidArgument, "attack_loss: zero embedding");
  const double j = e.vector.dot(target) / (ne * nt);
  const double sign = mode == AttackMode::kDodge ? 1.0 : -1.0;
  const VectorX dj = target / (ne * nt) - j * e.vector / (ne * ne);

  AttackLoss out;
  out.similarity = j;
  out.loss = sign * j;
  out.gradient = embed_backward(model, e.cache, sign * dj);
  return out;
}

AttackLoss attack_loss(const recognition::EmbeddingModel& model, const Image& x_star,
                       const Image& x_b, AttackMode mode) {
  return attack_loss(model, x_star, embed(model, x_b).vector, mode);
}

render::RenderParams params_for(const render::RenderParams& camera,
                                const morphable::Coefficients& c) {
  render::RenderParams p = camera;
  p.pose = c.pose;
  p.illumination = c.gamma;
  return p;
}

SceneEvaluation evaluate_scene(const Scene& scene, const VertexMatrix& positions,
                               const VertexMatrix& colors, bool with_gradients) {
  require(scene.model != nullptr, ErrorCode::kInvalidArgument, "evaluate_scene: no model");
  SceneEvaluation ev;
  ev.render = render::rasterize(positions, colors, scene.patch, scene.params);
  ev.composite = render::composite(ev.render, scene.attacker_image);
  AttackLoss l = attack_loss(*scene.model, ev.composite, scene.target_embedding, scene.mode);
  ev.loss = l.loss;
  ev.similarity = l.similarity;
  if (with_gradients) {
    // dx*/dx^r is the mask.
    Image d_render(l.gradient.width, l.gradient.height);
    for (int y = 0; y < d_render.height; ++y)
      for (int x = 0; x < d_render.width; ++x)
        if (ev.render.mask.at(x, y))
          for (int c = 0; c < 3; ++c) d_render.at(x, y, c) = l.gradient.at(x, y, c);
    render::RenderGradients g =
        render::render_backward(ev.render, positions, colors, scene.params, d_render);
    ev.d_positions = std::move(g.positions);
    ev.d_colors = std::move(g.colors);
  }
  return ev;
}

}  // namespace at3d::attack
