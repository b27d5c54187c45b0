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

#include "at3d/mesh/mesh.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "at3d/core/error.hpp"

namespace at3d::mesh {

void validate(const Mesh& mesh) {
  const auto n = static_cast<int>(mesh.positions.rows());
  require(mesh.colors.rows() == mesh.positions.rows(),
          ErrorCode::kInvalidArgument,
          "mesh: colors has " + std::to_string(mesh.colors.rows()) +
              " rows, positions has " + std::to_string(n));
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    const auto face = mesh.faces.row(f);
    for (int k = 0; k < 3; ++k) {
      require(face(k) >= 0 && face(k) < n, ErrorCode::kInvalidArgument,
              "mesh: face " + std::to_string(f) + " index " +
                  std::to_string(face(k)) + " out of range");
    }
    require(face(0) != face(1) && face(1) != face(2) && face(0) != face(2),
            ErrorCode::kInvalidArgument,
            "mesh: face " + std::to_string(f) + " repeats a vertex");
  }
  for (Eigen::Index i = 0; i < mesh.colors.rows(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double v = mesh.colors(i, c);
      require(v >= 0.0 && v <= 255.0, ErrorCode::kInvalidArgument,
              "mesh: color of vertex " + std::to_string(i) +
                  " outside [0, 255]");
    }
  }
}

Mesh compact(const Mesh& mesh, std::vector<int>* old_index) {
  const auto n = static_cast<int>(mesh.positions.rows());
  std::vector<int> remap(n, -1);
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k) remap[mesh.faces(f, k)] = 0;
  }
  std::vector<int> kept;
  for (int i = 0; i < n; ++i) {
    if (remap[i] == 0) {
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(i);
    }
  }
  Mesh out;
  out.positions.resize(static_cast<Eigen::Index>(kept.size()), 3);
  out.colors.resize(static_cast<Eigen::Index>(kept.size()), 3);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    out.positions.row(j) = mesh.positions.row(kept[j]);
    out.colors.row(j) = mesh.colors.row(kept[j]);
  }
  out.faces.resize(mesh.faces.rows(), 3);
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k) out.faces(f, k) = remap[mesh.faces(f, k)];
  }
  if (old_index) *old_index = std::move(kept);
  return out;
}

std::vector<Edge> unique_edges(const FaceMatrix& faces) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(faces.rows()) * 3);
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = faces(f, k);
      int b = faces(f, (k + 1) % 3);
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::vector<int>> vertex_neighbors(const FaceMatrix& faces,
                                               std::size_t vertex_count) {
  std::vector<std::vector<int>> nbrs(vertex_count);
  for (const auto& [a, b] : unique_edges(faces)) {
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

std::vector<bool> boundary_vertices(const FaceMatrix& faces,
                                    std::size_t vertex_count) {
  std::map<Edge, int> uses;
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = faces(f, k);
      int b = faces(f, (k + 1) % 3);
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  }
  std::vector<bool> boundary(vertex_count, false);
  for (const auto& [edge, count] : uses) {
    if (count == 1) {
      boundary[edge.first] = true;
      boundary[edge.second] = true;
    }
  }
  return boundary;
}

std::vector<int> incident_face_counts(const FaceMatrix& faces,
                                      std::size_t vertex_count) {
  std::vector<int> counts(vertex_count, 0);
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k) ++counts[faces(f, k)];
  }
  return counts;
}

Mesh make_grid(int nx, int ny, double h) {
  require(nx >= 2 && ny >= 2, ErrorCode::kInvalidArgument,
          "make_grid: need at least 2x2 vertices");
  Mesh m;
  m.positions.resize(nx * ny, 3);
  m.colors = VertexMatrix::Constant(nx * ny, 3, 128.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.positions.row(j * nx + i) << i * h, j * h, 0.0;
    }
  }
  m.faces.resize(2 * (nx - 1) * (ny - 1), 3);
  int f = 0;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int v00 = j * nx + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + nx;
      const int v11 = v01 + 1;
      m.faces.row(f++) << v00, v01, v10;
      m.faces.row(f++) << v10, v01, v11;
    }
  }
  return m;
}

}  // namespace at3d::mesh
