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

#include "at3d/morphable/morphable_model.hpp"

#include <cmath>
#include <numbers>

#include "at3d/core/error.hpp"
#include "at3d/core/rng.hpp"
#include "at3d/mesh/patch.hpp"

namespace at3d::morphable {

namespace {

using mesh::FaceFrame;

constexpr int kMaxFrequency = 6;  // cosine modes 0..6 per grid axis

double gauss2(double x, double y, double cx, double cy, double sx, double sy) {
  const double dx = (x - cx) / sx;
  const double dy = (y - cy) / sy;
  return std::exp(-0.5 * (dx * dx + dy * dy));
}

// Height of the canonical face toward the camera (>= 0).
double face_height(double x, double y) {
  const double ex = x / (FaceFrame::kHalfWidth * 1.05);
  const double ey = y / (FaceFrame::kHalfHeight * 1.05);
  const double r2 = ex * ex + ey * ey;
  double h = r2 < 1.0 ? 45.0 * std::sqrt(1.0 - r2) : 0.0;
  // Nose ridge and tip.
  const double ridge = std::clamp((y + 20.0) / 45.0, 0.0, 1.0);
  h += 24.0 * ridge * std::exp(-0.5 * (x * x) / (7.0 * 7.0 + 40.0 * ridge)) *
       gauss2(0.0, y, 0.0, 10.0, 1.0, 28.0);
  // Eye sockets and brow ridge.
  for (double side : {-1.0, 1.0}) {
    h -= 9.0 * gauss2(x, y, side * FaceFrame::kEyeX, FaceFrame::kEyeY, 11.0, 8.0);
    h += 3.0 * gauss2(x, y, side * FaceFrame::kEyeX, FaceFrame::kEyeY - 16.0, 16.0, 5.0);
  }
  // Lips and chin.
  h += 4.0 * gauss2(x, y, 0.0, 52.0, 18.0, 6.0);
  h += 3.0 * gauss2(x, y, 0.0, 82.0, 20.0, 9.0);
  return std::max(h, 0.0);
}

Vec3 face_color(double x, double y) {
  Vec3 c(205.0, 158.0, 132.0);
  auto blend = [&c](const Vec3& target, double w) { c = (1.0 - w) * c + w * target; };
  for (double side : {-1.0, 1.0}) {
    blend(Vec3(235.0, 232.0, 228.0),
          gauss2(x, y, side * FaceFrame::kEyeX, FaceFrame::kEyeY, 9.0, 4.5));
    blend(Vec3(70.0, 50.0, 40.0),
          gauss2(x, y, side * FaceFrame::kEyeX, FaceFrame::kEyeY, 3.8, 3.8));
    blend(Vec3(95.0, 68.0, 50.0),
          gauss2(x, y, side * FaceFrame::kEyeX, FaceFrame::kEyeY - 15.0, 12.0, 2.8));
  }
  blend(Vec3(175.0, 92.0, 92.0), gauss2(x, y, 0.0, 52.0, 15.0, 4.0));
  blend(Vec3(185.0, 130.0, 110.0), gauss2(x, y, 0.0, 25.0, 8.0, 5.0));
  return c;
}

// Smooth taper: 1 inside the face ellipse, decaying toward the grid rim.
double face_window(double x, double y) {
  const double ex = x / FaceFrame::kHalfWidth;
  const double ey = y / FaceFrame::kHalfHeight;
  const double r2 = ex * ex + ey * ey;
  return r2 < 0.7 ? 1.0 : std::exp(-3.0 * (r2 - 0.7));
}

struct GridCoords {
  VectorX u, v, x, y;
  MatrixX modes;  // n x (kMaxFrequency+1)^2 products cos(pi kx u) cos(pi ky v)
};

GridCoords grid_coords(int res) {
  const int n = res * res;
  GridCoords g{VectorX(n), VectorX(n), VectorX(n), VectorX(n), MatrixX()};
  for (int j = 0; j < res; ++j) {
    for (int i = 0; i < res; ++i) {
      const int k = j * res + i;
      g.u(k) = static_cast<double>(i) / (res - 1);
      g.v(k) = static_cast<double>(j) / (res - 1);
      g.x(k) = (2.0 * g.u(k) - 1.0) * FaceFrame::kHalfWidth;
      g.y(k) = (2.0 * g.v(k) - 1.0) * FaceFrame::kHalfHeight;
    }
  }
  constexpr int kModes = kMaxFrequency + 1;
  g.modes.resize(n, kModes * kModes);
  for (int ky = 0; ky < kModes; ++ky) {
    for (int kx = 0; kx < kModes; ++kx) {
      for (int k = 0; k < n; ++k) {
        g.modes(k, ky * kModes + kx) = std::cos(std::numbers::pi * kx * g.u(k)) *
                                       std::cos(std::numbers::pi * ky * g.v(k));
      }
    }
  }
  return g;
}

// One band-limited scalar field: random cosine-mode combination with
// amplitudes falling off as 1 / (1 + |k|^2).
VectorX smooth_field(const GridCoords& g, Rng& rng) {
  constexpr int kModes = kMaxFrequency + 1;
  VectorX amp(kModes * kModes);
  for (int ky = 0; ky < kModes; ++ky)
    for (int kx = 0; kx < kModes; ++kx)
      amp(ky * kModes + kx) = rng.normal() / (1.0 + kx * kx + ky * ky);
  return g.modes * amp;
}

// Columns of `m` made orthonormal by two passes of modified Gram-Schmidt.
void orthonormalize(MatrixX& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index p = 0; p < c; ++p) {
        m.col(c) -= m.col(p).dot(m.col(c)) * m.col(p);
      }
    }
    const double norm = m.col(c).norm();
    require(norm > 1e-10, ErrorCode::kInvalidArgument,
            "generate_synthetic_model: degenerate basis column");
    m.col(c) /= norm;
  }
}

// Shape bases displace mostly along depth; `region` reweights the field
// (identity: whole face, expression: mouth and brows).
MatrixX shape_basis(const GridCoords& g, int cols, Rng& rng, bool expression) {
  const auto n = g.u.size();
  MatrixX basis(3 * n, cols);
  for (int c = 0; c < cols; ++c) {
    const VectorX fx = smooth_field(g, rng);
    const VectorX fy = smooth_field(g, rng);
    const VectorX fz = smooth_field(g, rng);
    for (Eigen::Index k = 0; k < n; ++k) {
      double w = face_window(g.x(k), g.y(k));
      if (expression) {
        w *= 0.2 + gauss2(g.x(k), g.y(k), 0.0, 52.0, 35.0, 25.0) +
             0.6 * gauss2(g.x(k), g.y(k), 0.0, FaceFrame::kEyeY - 15.0, 50.0, 12.0);
      }
      basis(3 * k + 0, c) = 0.35 * w * fx(k);
      basis(3 * k + 1, c) = 0.35 * w * fy(k);
      basis(3 * k + 2, c) = w * fz(k);
    }
  }
  orthonormalize(basis);
  return basis;
}

// Texture bases: a shared luminance field plus per-channel chroma fields.
MatrixX texture_basis(const GridCoords& g, int cols, Rng& rng) {
  const auto n = g.u.size();
  MatrixX basis(3 * n, cols);
  for (int c = 0; c < cols; ++c) {
    const VectorX lum = smooth_field(g, rng);
    VectorX chroma[3] = {smooth_field(g, rng), smooth_field(g, rng),
                         smooth_field(g, rng)};
    for (Eigen::Index k = 0; k < n; ++k) {
      const double w = face_window(g.x(k), g.y(k));
      for (int ch = 0; ch < 3; ++ch)
        basis(3 * k + ch, c) = w * (lum(k) + 0.45 * chroma[ch](k));
    }
  }
  orthonormalize(basis);
  return basis;
}

// Per-column deviation: `rms_first` model units (or color units) of RMS
// per-coordinate displacement for the first column, decaying geometrically.
VectorX geometric_std(int cols, double rms_first, double decay, Eigen::Index rows) {
  VectorX s(cols);
  const double scale = rms_first * std::sqrt(static_cast<double>(rows));
  for (int c = 0; c < cols; ++c) s(c) = scale * std::pow(decay, c);
  return s;
}

}  // namespace

MorphableModel generate_synthetic_model(std::uint64_t seed, int grid_resolution) {
  require(grid_resolution >= 8, ErrorCode::kInvalidArgument,
          "generate_synthetic_model: grid_resolution must be >= 8, got " +
              std::to_string(grid_resolution));
  const int res = grid_resolution;
  const int n = res * res;
  const auto g = grid_coords(res);

  MorphableModel model;
  model.seed = seed;
  model.grid_resolution = res;
  model.mean_shape.resize(n, 3);
  model.mean_texture.resize(n, 3);
  for (int k = 0; k < n; ++k) {
    model.mean_shape.row(k) << g.x(k), g.y(k), -face_height(g.x(k), g.y(k));
    model.mean_texture.row(k) = face_color(g.x(k), g.y(k)).transpose();
  }

  // Same anti-diagonal triangulation as mesh::make_grid; faces point toward -z.
  model.faces.resize(2 * (res - 1) * (res - 1), 3);
  int f = 0;
  for (int j = 0; j + 1 < res; ++j) {
    for (int i = 0; i + 1 < res; ++i) {
      const int v00 = j * res + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + res;
      const int v11 = v01 + 1;
      model.faces.row(f++) << v00, v01, v10;
      model.faces.row(f++) << v10, v01, v11;
    }
  }

  Rng id_rng(derive_seed(seed, 1));
  Rng exp_rng(derive_seed(seed, 2));
  Rng tex_rng(derive_seed(seed, 3));
  model.basis_id = shape_basis(g, kIdentityDim, id_rng, false);
  model.basis_exp = shape_basis(g, kExpressionDim, exp_rng, true);
  model.basis_tex = texture_basis(g, kTextureDim, tex_rng);

  const Eigen::Index rows = 3 * n;
  model.std_id = geometric_std(kIdentityDim, 1.2, 0.96, rows);
  model.std_exp = geometric_std(kExpressionDim, 1.2, 0.95, rows);
  model.std_tex = geometric_std(kTextureDim, 5.0, 0.96, rows);
  return model;
}

}  // namespace at3d::morphable
