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

#include "at3d/mesh/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "at3d/core/error.hpp"

namespace at3d::mesh {

namespace {

// Nearest neighbour of every query point among `targets`, by a sweep over
// targets sorted on x: the scan outward from the query's x position stops once
// the x gap alone exceeds the best squared distance found.
std::vector<int> nearest_neighbors(const VertexMatrix& queries,
                                   const VertexMatrix& targets) {
  const auto nt = static_cast<int>(targets.rows());
  std::vector<int> order(nt);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return targets(a, 0) < targets(b, 0);
  });
  std::vector<double> xs(nt);
  for (int k = 0; k < nt; ++k) xs[k] = targets(order[k], 0);

  std::vector<int> nn(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    const Vec3 p = queries.row(q);
    const int start = static_cast<int>(
        std::lower_bound(xs.begin(), xs.end(), p.x()) - xs.begin());
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    auto visit = [&](int k) {
      const double d2 = (targets.row(order[k]).transpose() - p).squaredNorm();
      if (d2 < best || (d2 == best && order[k] < best_idx)) {
        best = d2;
        best_idx = order[k];
      }
    };
    for (int k = start; k < nt; ++k) {
      const double dx = xs[k] - p.x();
      if (dx * dx > best) break;
      visit(k);
    }
    for (int k = start - 1; k >= 0; --k) {
      const double dx = p.x() - xs[k];
      if (dx * dx > best) break;
      visit(k);
    }
    nn[q] = best_idx;
  }
  return nn;
}

}  // namespace

double chamfer_distance(const VertexMatrix& a, const VertexMatrix& b,
                        VertexMatrix* grad_a) {
  require(a.rows() > 0 && b.rows() > 0, ErrorCode::kInvalidArgument,
          "chamfer_distance: point sets must be non-empty");
  const auto nn_ab = nearest_neighbors(a, b);
  const auto nn_ba = nearest_neighbors(b, a);
  const double na = static_cast<double>(a.rows());
  const double nb = static_cast<double>(b.rows());

  if (grad_a) grad_a->setZero(a.rows(), 3);
  double term_a = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vec3 d = a.row(i) - b.row(nn_ab[i]);
    term_a += d.squaredNorm();
    if (grad_a) grad_a->row(i) += (2.0 / na) * d.transpose();
  }
  double term_b = 0.0;
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    const Vec3 d = a.row(nn_ba[j]) - b.row(j);
    term_b += d.squaredNorm();
    if (grad_a) grad_a->row(nn_ba[j]) += (2.0 / nb) * d.transpose();
  }
  return term_a / na + term_b / nb;
}

double laplacian_loss(const Mesh& mesh, bool interior_only, VertexMatrix* grad) {
  const auto n = mesh.vertex_count();
  const auto nbrs = vertex_neighbors(mesh.faces, n);
  std::vector<bool> boundary;
  if (interior_only) boundary = boundary_vertices(mesh.faces, n);

  std::vector<int> evaluated;
  for (std::size_t i = 0; i < n; ++i) {
    if (nbrs[i].empty()) continue;
    if (interior_only && boundary[i]) continue;
    evaluated.push_back(static_cast<int>(i));
  }
  require(!evaluated.empty(), ErrorCode::kIsolatedVertex,
          "laplacian_loss: no vertex with neighbours");

  const double inv_count = 1.0 / static_cast<double>(evaluated.size());
  if (grad) grad->setZero(static_cast<Eigen::Index>(n), 3);
  double total = 0.0;
  for (int i : evaluated) {
    Vec3 mean = Vec3::Zero();
    for (int j : nbrs[i]) mean += mesh.positions.row(j).transpose();
    const double inv_k = 1.0 / static_cast<double>(nbrs[i].size());
    mean *= inv_k;
    const Vec3 d = mesh.positions.row(i).transpose() - mean;
    total += d.squaredNorm();
    if (grad) {
      grad->row(i) += (2.0 * inv_count) * d.transpose();
      for (int j : nbrs[i]) grad->row(j) -= (2.0 * inv_count * inv_k) * d.transpose();
    }
  }
  return total * inv_count;
}

double edge_length_loss(const Mesh& mesh, const Mesh& reference,
                        VertexMatrix* grad) {
  require(mesh.faces.rows() == reference.faces.rows() &&
              mesh.faces == reference.faces &&
              mesh.positions.rows() == reference.positions.rows(),
          ErrorCode::kTopologyMismatch,
          "edge_length_loss: mesh and reference do not share a face list");
  const auto edges = unique_edges(mesh.faces);
  require(!edges.empty(), ErrorCode::kInvalidArgument,
          "edge_length_loss: mesh has no edges");
  const double inv_count = 1.0 / static_cast<double>(edges.size());
  if (grad) grad->setZero(mesh.positions.rows(), 3);
  double total = 0.0;
  for (const auto& [a, b] : edges) {
    const Vec3 e = mesh.positions.row(b) - mesh.positions.row(a);
    const double len = e.norm();
    const double ref =
        (reference.positions.row(b) - reference.positions.row(a)).norm();
    const double diff = len - ref;
    total += diff * diff;
    if (grad && len > 0.0) {
      const Vec3 g = (2.0 * inv_count * diff / len) * e;
      grad->row(b) += g.transpose();
      grad->row(a) -= g.transpose();
    }
  }
  return total * inv_count;
}

}  // namespace at3d::mesh
