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

#include "at3d/mesh/mesh.hpp"

namespace at3d::mesh {

// Symmetric mean squared nearest-neighbour distance:
//   mean_a min_b |a - b|^2 + mean_b min_a |a - b|^2.
// `grad_a`, when given, receives d/da (b is treated as fixed).
double chamfer_distance(const VertexMatrix& a, const VertexMatrix& b,
                        VertexMatrix* grad_a = nullptr);

// Mean over evaluated vertices of |p_i - mean(1-ring of p_i)|^2. Evaluated
// vertices are the referenced vertices, or only the interior ones.
double laplacian_loss(const Mesh& mesh, bool interior_only = false,
                      VertexMatrix* grad = nullptr);

// Mean over unique edges of (|e| - |e_ref|)^2. Faces of both meshes must match.
double edge_length_loss(const Mesh& mesh, const Mesh& reference,
                        VertexMatrix* grad = nullptr);

}  // namespace at3d::mesh
