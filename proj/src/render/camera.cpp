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

#include "at3d/render/camera.hpp"

#include <cmath>
#include <string>

#include "at3d/core/error.hpp"
#include "at3d/morphable/morphable_model.hpp"

namespace at3d::render {

VectorX RenderParams::default_pose() { return morphable::frontal_pose(); }
VectorX RenderParams::default_illumination() {
  return morphable::ambient_illumination();
}

void validate(const RenderParams& params) {
  require(params.width >= 8 && params.height >= 8, ErrorCode::kInvalidArgument,
          "render params: image must be at least 8x8, got " +
              std::to_string(params.width) + "x" + std::to_string(params.height));
  require(params.near_clip > 0.0, ErrorCode::kInvalidArgument,
          "render params: near_clip must be positive");
  require(params.focal > 0.0, ErrorCode::kInvalidArgument,
          "render params: focal length must be positive");
  require(params.pose.size() == 6 && params.illumination.size() == 9,
          ErrorCode::kDimensionMismatch,
          "render params: pose needs 6 entries and illumination 9");
  require(params.pose.allFinite() && params.illumination.allFinite(),
          ErrorCode::kNonFinite, "render params: non-finite pose or illumination");
}

Mat3 euler_rotation(double ax, double ay, double az) {
  const double cx = std::cos(ax), sx = std::sin(ax);
  const double cy = std::cos(ay), sy = std::sin(ay);
  const double cz = std::cos(az), sz = std::sin(az);
  Mat3 rx, ry, rz;
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return rx * ry * rz;
}

Mat3 pose_rotation(const VectorX& pose) {
  return euler_rotation(pose(0), pose(1), pose(2));
}

Vec3 pose_translation(const VectorX& pose) { return {pose(3), pose(4), pose(5)}; }

Projection project(const VertexMatrix& positions, const RenderParams& params) {
  validate(params);
  const Mat3 r = pose_rotation(params.pose);
  const Vec3 t = pose_translation(params.pose);
  const auto n = positions.rows();
  Projection p;
  p.camera.resize(n, 3);
  p.screen.resize(n, 2);
  p.depth.resize(n);
  p.in_front.assign(static_cast<std::size_t>(n), false);
  const double cx = 0.5 * params.width;
  const double cy = 0.5 * params.height;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 q = r * positions.row(i).transpose() + t;
    p.camera.row(i) = q.transpose();
    p.depth(i) = q.z();
    p.in_front[i] = q.z() > params.near_clip;
    if (p.in_front[i]) {
      p.screen(i, 0) = params.focal * q.x() / q.z() + cx;
      p.screen(i, 1) = params.focal * q.y() / q.z() + cy;
    } else {
      p.screen.row(i).setZero();
    }
  }
  return p;
}

}  // namespace at3d::render
