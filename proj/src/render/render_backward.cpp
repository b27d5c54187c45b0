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

#include <string>

#include "at3d/core/error.hpp"
#include "at3d/render/rasterizer.hpp"
#include "at3d/render/sh.hpp"

namespace at3d::render {

namespace {

using Vec2 = Eigen::Vector2d;

// d w / d a and d w / d b for w = cross(b - a, p - a).
inline Vec2 dw_da(const Vec2& b, const Vec2& p) { return {b.y() - p.y(), p.x() - b.x()}; }
inline Vec2 dw_db(const Vec2& a, const Vec2& p) { return {p.y() - a.y(), a.x() - p.x()}; }

}  // namespace

RenderGradients render_backward(const RenderOutput& output,
                                const VertexMatrix& positions,
                                const VertexMatrix& colors,
                                const RenderParams& params,
                                const Image& dL_dimage) {
  const auto n = positions.rows();
  require(dL_dimage.width == output.width && dL_dimage.height == output.height &&
              params.width == output.width && params.height == output.height,
          ErrorCode::kDimensionMismatch,
          "render_backward: gradient image does not match the render buffers");
  require(output.projection.camera.rows() == n && colors.rows() == n &&
              output.face_id.size() == static_cast<std::size_t>(output.width) * output.height,
          ErrorCode::kDimensionMismatch,
          "render_backward: buffers were not produced for this mesh");

  VertexMatrix d_shaded = VertexMatrix::Zero(n, 3);
  using ScreenGrad = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
  ScreenGrad d_screen = ScreenGrad::Zero(n, 2);

  const auto& screen = output.projection.screen;
  const std::size_t pixels = output.face_id.size();
  for (std::size_t p = 0; p < pixels; ++p) {
    const int f = output.face_id[p];
    if (f < 0) continue;
    const Vec3 g(dL_dimage.data[3 * p], dL_dimage.data[3 * p + 1],
                 dL_dimage.data[3 * p + 2]);
    if (g.isZero(0.0)) continue;
    const int idx[3] = {output.faces(f, 0), output.faces(f, 1), output.faces(f, 2)};
    const double* bary = &output.barycentric[3 * p];

    // Colour path and d L / d barycentric.
    double g_bary[3];
    for (int k = 0; k < 3; ++k) {
      d_shaded.row(idx[k]) += bary[k] * g.transpose();
      g_bary[k] = g.dot(output.shaded_colors.row(idx[k]).transpose());
    }
    const double g_mean = g_bary[0] * bary[0] + g_bary[1] * bary[1] + g_bary[2] * bary[2];

    // b_k = w_k / A with w_k the edge function opposite vertex k and
    // A = w_0 + w_1 + w_2, so dL/ds_j = (1/A) sum_k (g_k - g_mean) dw_k/ds_j.
    const Vec2 s0 = screen.row(idx[0]).transpose();
    const Vec2 s1 = screen.row(idx[1]).transpose();
    const Vec2 s2 = screen.row(idx[2]).transpose();
    const Vec2 px(static_cast<double>(p % output.width) + 0.5,
                  static_cast<double>(p / output.width) + 0.5);
    const double area = (s1.x() - s0.x()) * (s2.y() - s0.y()) -
                        (s1.y() - s0.y()) * (s2.x() - s0.x());
    const double c0 = (g_bary[0] - g_mean) / area;
    const double c1 = (g_bary[1] - g_mean) / area;
    const double c2 = (g_bary[2] - g_mean) / area;
    // w0 = cross(s2 - s1, p - s1), w1 = cross(s0 - s2, p - s2), w2 = cross(s1 - s0, p - s0).
    d_screen.row(idx[1]) += (c0 * dw_da(s2, px) + c2 * dw_db(s0, px)).transpose();
    d_screen.row(idx[2]) += (c0 * dw_db(s1, px) + c1 * dw_da(s0, px)).transpose();
    d_screen.row(idx[0]) += (c1 * dw_db(s2, px) + c2 * dw_da(s1, px)).transpose();
  }

  RenderGradients grads;
  grads.colors = VertexMatrix::Zero(n, 3);
  grads.gamma = VectorX::Zero(9);
  VertexMatrix d_camera = VertexMatrix::Zero(n, 3);
  VertexMatrix d_area_normal = VertexMatrix::Zero(n, 3);

  const auto& cam = output.projection.camera;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!output.referenced[i]) continue;
    // Projection: u = f x / z + cx, v = f y / z + cy.
    const double du = d_screen(i, 0), dv = d_screen(i, 1);
    if ((du != 0.0 || dv != 0.0) && output.projection.in_front[i]) {
      const double z = cam(i, 2);
      const double fz = params.focal / z;
      d_camera(i, 0) += du * fz;
      d_camera(i, 1) += dv * fz;
      d_camera(i, 2) -= (du * cam(i, 0) + dv * cam(i, 1)) * fz / z;
    }

    // Shading: shaded = clamp(T * s).
    double d_shading = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double gc = d_shaded(i, c) * output.shade_active(i, c);
      grads.colors(i, c) = gc * output.shading(i);
      d_shading += gc * colors(i, c);
    }
    if (d_shading == 0.0) continue;
    const Vec3 nrm = output.normals.row(i).transpose();
    const auto basis = sh_basis(nrm);
    const auto basis_grad = sh_basis_gradient(nrm);
    Vec3 d_normal = Vec3::Zero();
    for (int k = 0; k < 9; ++k) {
      grads.gamma(k) += d_shading * basis[k];
      d_normal += d_shading * params.illumination(k) * basis_grad[k];
    }
    // n = m / |m|.
    const double len = output.area_normals.row(i).norm();
    if (len == 0.0) continue;
    d_area_normal.row(i) = ((d_normal - nrm * nrm.dot(d_normal)) / len).transpose();
  }

  // m_v = sum over incident faces of (q1 - q0) x (q2 - q0).
  for (Eigen::Index f = 0; f < output.faces.rows(); ++f) {
    const int i0 = output.faces(f, 0), i1 = output.faces(f, 1), i2 = output.faces(f, 2);
    const Vec3 g = (d_area_normal.row(i0) + d_area_normal.row(i1) + d_area_normal.row(i2)).transpose();
    if (g.isZero(0.0)) continue;
    const Vec3 q0 = cam.row(i0), q1 = cam.row(i1), q2 = cam.row(i2);
    d_camera.row(i0) += (q1 - q2).cross(g).transpose();
    d_camera.row(i1) += (q2 - q0).cross(g).transpose();
    d_camera.row(i2) += (q0 - q1).cross(g).transpose();
  }

  // q = R p + t.
  const Mat3 r = pose_rotation(params.pose);
  grads.positions = d_camera * r;
  return grads;
}

}  // namespace at3d::render
