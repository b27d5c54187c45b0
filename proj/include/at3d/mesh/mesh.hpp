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

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "at3d/core/types.hpp"

namespace at3d::mesh {

// Triangle mesh with per-vertex RGB colors in [0, 255].
struct Mesh {
  VertexMatrix positions;
  VertexMatrix colors;
  FaceMatrix faces;

  std::size_t vertex_count() const { return static_cast<std::size_t>(positions.rows()); }
  std::size_t face_count() const { return static_cast<std::size_t>(faces.rows()); }
};

// Throws kInvalidArgument when any Mesh invariant is violated: index range,
// repeated indices within a face, color range, positions/colors row mismatch.
void validate(const Mesh& mesh);

// Copy of `mesh` holding only vertices referenced by `mesh.faces`, reindexed in
// increasing original order. `old_index`, when given, receives the original
// index of each kept vertex.
Mesh compact(const Mesh& mesh, std::vector<int>* old_index = nullptr);

using Edge = std::pair<int, int>;  // first < second

// Unique undirected edges, sorted lexicographically.
std::vector<Edge> unique_edges(const FaceMatrix& faces);

// Sorted neighbor lists (1-ring) for every vertex in [0, vertex_count).
std::vector<std::vector<int>> vertex_neighbors(const FaceMatrix& faces,
                                               std::size_t vertex_count);

// Per-vertex flag: true when the vertex lies on an edge used by exactly one face.
std::vector<bool> boundary_vertices(const FaceMatrix& faces,
                                    std::size_t vertex_count);

// Per-vertex count of incident faces.
std::vector<int> incident_face_counts(const FaceMatrix& faces,
                                      std::size_t vertex_count);

// Regular grid in the z = 0 plane with `nx` x `ny` vertices and spacing `h`,
// triangulated along the anti-diagonal. Colors are mid-grey.
Mesh make_grid(int nx, int ny, double h);

}  // namespace at3d::mesh
