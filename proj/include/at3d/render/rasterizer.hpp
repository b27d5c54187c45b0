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

#include <vector>

#include "at3d/core/image.hpp"
#include "at3d/core/types.hpp"
#include "at3d/mesh/patch.hpp"
#include "at3d/render/camera.hpp"

namespace at3d::render {

// Forward render plus the per-pixel and per-vertex state the backward pass
// replays. Pixel buffers are row-major; barycentrics hold 3 weights per pixel
// for the vertices of face_id's triangle in its stored order.
struct RenderOutput {
  Image image;  // x^r, black outside the mask
  Mask mask;    // M
  std::vector<int> face_id;  // index into `faces`, -1 for background
  std::vector<double> barycentric;
  std::vector<double> depth;

  // Cached forward state.
  FaceMatrix faces;
  Projection projection;
  VertexMatrix area_normals;   // unnormalized, camera space
  VertexMatrix normals;        // unit, camera space
  VectorX shading;
  VertexMatrix shaded_colors;  // clamp(T * shading)
  VertexMatrix shade_active;   // 1 where that clamp was inactive
  std::vector<bool> referenced;
  int width = 0;
  int height = 0;
};

// Hard z-buffered rasterization of the patch faces with Lambertian SH shading
// and screen-space barycentric colour interpolation. Pixel centres are
// sampled; pixels exactly on an edge shared by two triangles belong to one of
// them (top-left rule). Faces with a vertex at or behind the near plane are
// culled. Depth ties go to the lower face index.
RenderOutput rasterize(const VertexMatrix& positions, const VertexMatrix& colors,
                       const mesh::PatchTopology& topology,
                       const RenderParams& params);

// x* = M * x^r + (1 - M) * x^a.
Image composite(const RenderOutput& render, const Image& attacker_image);

struct RenderGradients {
  VertexMatrix positions;
  VertexMatrix colors;
  VectorX gamma;
};

// Reverse-mode derivative of `image` with respect to vertex positions,
// vertex colours and illumination. Only covered pixels contribute; the
// silhouette (coverage change) has zero gradient.
RenderGradients render_backward(const RenderOutput& output,
                                const VertexMatrix& positions,
                                const VertexMatrix& colors,
                                const RenderParams& params,
                                const Image& dL_dimage);

}  // namespace at3d::render
