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

#include "at3d/core/types.hpp"

namespace at3d::render {

// Real spherical harmonics, bands 0-2, in (l, m) order
// (0,0) (1,-1) (1,0) (1,1) (2,-2) (2,-1) (2,0) (2,1) (2,2):
//   Y0 = 0.282095            Y1 = 0.488603 y   Y2 = 0.488603 z   Y3 = 0.488603 x
//   Y4 = 1.092548 xy         Y5 = 1.092548 yz  Y6 = 0.315392 (3z^2 - 1)
//   Y7 = 1.092548 xz         Y8 = 0.546274 (x^2 - y^2)
inline constexpr double kShBand0 = 0.28209479177387814;
inline constexpr double kShBand1 = 0.4886025119029199;
inline constexpr double kShBand2Cross = 1.0925484305920792;
inline constexpr double kShBand2Zonal = 0.31539156525252005;
inline constexpr double kShBand2Diff = 0.5462742152960396;

using ShVector = std::array<double, 9>;

ShVector sh_basis(const Vec3& n);
// d Y_k / d n for each k (n treated as an unconstrained 3-vector).
std::array<Vec3, 9> sh_basis_gradient(const Vec3& n);

// shading(i) = sum_k gamma_k Y_k(normal_i). Normals must be unit length.
VectorX sh_shade(const VertexMatrix& normals, const VectorX& gamma);

}  // namespace at3d::render
