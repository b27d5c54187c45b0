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

#include "at3d/render/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "at3d/core/error.hpp"
#include "at3d/render/sh.hpp"

namespace at3d::render {

namespace {

// Below this |2 * screen area| a triangle is treated as degenerate and skipped.
constexpr double kMinDoubleArea = 1e-12;

struct Point2 {
  double x, y;
};

inline double edge_function(const Point2& a, const Point2& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Top-left ownership for an edge a->b of a triangle with positive edge
// functions inside (clockwise on a y-down screen).
inline bool owns_edge(const Point2& a, const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

void shade_vertices(RenderOutput& out, const VertexMatrix& colors,
                    const VectorX& gamma) {
  const auto n = out.projection.camera.rows();
  out.area_normals = VertexMatrix::Zero(n, 3);
  out.referenced.assign(static_cast<std::size_t>(n), false);
  const auto& q = out.projection.camera;
  for (Eigen::Index f = 0; f < out.faces.rows(); ++f) {
    const int i0 = out.faces(f, 0), i1 = out.faces(f, 1), i2 = out.faces(f, 2);
    const Vec3 e1 = q.row(i1) - q.row(i0);
    const Vec3 e2 = q.row(i2) - q.row(i0);
    const Vec3 nrm = e1.cross(e2);
    for (int v : {i0, i1, i2}) {
      out.area_normals.row(v) += nrm.transpose();
      out.referenced[v] = true;
    }
  }
  out.normals = VertexMatrix::Zero(n, 3);
  out.shading = VectorX::Zero(n);
  out.shaded_colors = VertexMatrix::Zero(n, 3);
  out.shade_active = VertexMatrix::Zero(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double len = out.area_normals.row(i).norm();
    if (!out.referenced[i] || len == 0.0) continue;
    out.normals.row(i) = out.area_normals.row(i) / len;
    const auto y = sh_basis(out.normals.row(i).transpose());
    double s = 0.0;
    for (int k = 0; k < 9; ++k) s += gamma(k) * y[k];
    out.shading(i) = s;
    for (int c = 0; c < 3; ++c) {
      const double raw = colors(i, c) * s;
      out.shaded_colors(i, c) = std::clamp(raw, 0.0, 255.0);
      out.shade_active(i, c) = (raw >= 0.0 && raw <= 255.0) ? 1.0 : 0.0;
    }
  }
}

}  // namespace

RenderOutput rasterize(const VertexMatrix& positions, const VertexMatrix& colors,
                       const mesh::PatchTopology& topology,
                       const RenderParams& params) {
  validate(params);
  require(topology.faces.rows() > 0, ErrorCode::kEmptyPatch,
          "rasterize: topology has no faces");
  require(colors.rows() == positions.rows(), ErrorCode::kDimensionMismatch,
          "rasterize: positions and colors differ in vertex count");
  const int w = params.width;
  const int h = params.height;
  const std::size_t pixels = static_cast<std::size_t>(w) * h;

  RenderOutput out;
  out.width = w;
  out.height = h;
  out.faces = topology.faces;
  out.projection = project(positions, params);
  shade_vertices(out, colors, params.illumination);

  out.image = Image(w, h, 0.0);
  out.mask = Mask(w, h, 0);
  out.face_id.assign(pixels, -1);
  out.barycentric.assign(pixels * 3, 0.0);
  out.depth.assign(pixels, std::numeric_limits<double>::infinity());

  const auto& screen = out.projection.screen;
  const auto& depth = out.projection.depth;
  for (Eigen::Index f = 0; f < out.faces.rows(); ++f) {
    const int idx[3] = {out.faces(f, 0), out.faces(f, 1), out.faces(f, 2)};
    if (!out.projection.in_front[idx[0]] || !out.projection.in_front[idx[1]] ||
        !out.projection.in_front[idx[2]])
      continue;
    Point2 s[3];
    for (int k = 0; k < 3; ++k) s[k] = {screen(idx[k], 0), screen(idx[k], 1)};
    const double area = edge_function(s[0], s[1], s[2].x, s[2].y);
    if (std::abs(area) < kMinDoubleArea) continue;
    // Orientation-normalized vertex order used only for the inside test.
    const int o[3] = {0, area > 0 ? 1 : 2, area > 0 ? 2 : 1};
    const Point2 a = s[o[0]], b = s[o[1]], c = s[o[2]];
    const bool own_bc = owns_edge(b, c), own_ca = owns_edge(c, a),
               own_ab = owns_edge(a, b);

    const double min_x = std::min({s[0].x, s[1].x, s[2].x});
    const double max_x = std::max({s[0].x, s[1].x, s[2].x});
    const double min_y = std::min({s[0].y, s[1].y, s[2].y});
    const double max_y = std::max({s[0].y, s[1].y, s[2].y});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(max_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(max_y - 0.5)));
    const double inv_area = 1.0 / area;

    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double wa = edge_function(b, c, px, py);
        const double wb = edge_function(c, a, px, py);
        const double wc = edge_function(a, b, px, py);
        if (wa < 0.0 || wb < 0.0 || wc < 0.0) continue;
        if ((wa == 0.0 && !own_bc) || (wb == 0.0 && !own_ca) ||
            (wc == 0.0 && !own_ab))
          continue;
        // Barycentrics in the stored vertex order.
        double bary[3];
        bary[0] = edge_function(s[1], s[2], px, py) * inv_area;
        bary[1] = edge_function(s[2], s[0], px, py) * inv_area;
        bary[2] = 1.0 - bary[0] - bary[1];
        const double inv_z = bary[0] / depth(idx[0]) + bary[1] / depth(idx[1]) +
                             bary[2] / depth(idx[2]);
        const double z = 1.0 / inv_z;
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        if (!(z < out.depth[p])) continue;
        out.depth[p] = z;
        out.face_id[p] = static_cast<int>(f);
        for (int k = 0; k < 3; ++k) out.barycentric[3 * p + k] = bary[k];
      }
    }
  }

  for (std::size_t p = 0; p < pixels; ++p) {
    const int f = out.face_id[p];
    if (f < 0) {
      out.depth[p] = 0.0;
      continue;
    }
    out.mask.data[p] = 1;
    for (int c = 0; c < 3; ++c) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k)
        v += out.barycentric[3 * p + k] * out.shaded_colors(out.faces(f, k), c);
      out.image.data[3 * p + c] = v;
    }
  }
  return out;
}

Image composite(const RenderOutput& render, const Image& attacker_image) {
  require_same_shape(render.image, attacker_image, "composite");
  Image out = attacker_image;
  for (std::size_t p = 0; p < render.mask.data.size(); ++p) {
    if (!render.mask.data[p]) continue;
    for (int c = 0; c < 3; ++c) out.data[3 * p + c] = render.image.data[3 * p + c];
  }
  return out;
}

}  // namespace at3d::render
