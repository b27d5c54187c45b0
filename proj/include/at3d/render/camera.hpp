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

#include "at3d/core/types.hpp"

namespace at3d::render {

// Camera and lighting for one render. Pose is (Euler X, Y, Z in radians,
// translation x, y, z); the camera sits at the origin looking down +z with
// image x to the right and image y down.
struct RenderParams {
  VectorX pose = default_pose();
  VectorX illumination = default_illumination();
  int width = 112;
  int height = 112;
  double focal = 296.0;  // pixels
  double near_clip = 1.0;

  static VectorX default_pose();
  static VectorX default_illumination();
  // Focal length that frames the canonical face at the frontal distance.
  static double framing_focal(int height) { return 296.0 * height / 112.0; }
};

// Throws kInvalidArgument on image < 8x8, non-positive near clip or focal,
// or wrong pose/illumination sizes.
void validate(const RenderParams& params);

// Intrinsic X-Y-Z Euler rotation: R = Rx(ax) * Ry(ay) * Rz(az).
Mat3 euler_rotation(double ax, double ay, double az);
Mat3 pose_rotation(const VectorX& pose);
Vec3 pose_translation(const VectorX& pose);

using ScreenMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

struct Projection {
  VertexMatrix camera;  // rotated + translated positions
  ScreenMatrix screen;  // pixel coordinates (pixel centres at +0.5)
  VectorX depth;        // camera-space z
  std::vector<bool> in_front;  // depth > near_clip
};

// Pinhole projection: (u, v) = focal * (x / z, y / z) + (width / 2, height / 2).
Projection project(const VertexMatrix& positions, const RenderParams& params);

}  // namespace at3d::render
