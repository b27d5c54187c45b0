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

#include "at3d/render/sh.hpp"

#include <string>

#include "at3d/core/error.hpp"

namespace at3d::render {

ShVector sh_basis(const Vec3& n) {
  const double x = n.x(), y = n.y(), z = n.z();
  return {kShBand0,
          kShBand1 * y,
          kShBand1 * z,
          kShBand1 * x,
          kShBand2Cross * x * y,
          kShBand2Cross * y * z,
          kShBand2Zonal * (3.0 * z * z - 1.0),
          kShBand2Cross * x * z,
          kShBand2Diff * (x * x - y * y)};
}

std::array<Vec3, 9> sh_basis_gradient(const Vec3& n) {
  const double x = n.x(), y = n.y(), z = n.z();
  return {Vec3::Zero(),
          Vec3(0.0, kShBand1, 0.0),
          Vec3(0.0, 0.0, kShBand1),
          Vec3(kShBand1, 0.0, 0.0),
          Vec3(kShBand2Cross * y, kShBand2Cross * x, 0.0),
          Vec3(0.0, kShBand2Cross * z, kShBand2Cross * y),
          Vec3(0.0, 0.0, 6.0 * kShBand2Zonal * z),
          Vec3(kShBand2Cross * z, 0.0, kShBand2Cross * x),
          Vec3(2.0 * kShBand2Diff * x, -2.0 * kShBand2Diff * y, 0.0)};
}

VectorX sh_shade(const VertexMatrix& normals, const VectorX& gamma) {
  require(gamma.size() == 9, ErrorCode::kDimensionMismatch,
          "sh_shade: gamma must have 9 entries, got " + std::to_string(gamma.size()));
  VectorX out(normals.rows());
  for (Eigen::Index i = 0; i < normals.rows(); ++i) {
    const auto y = sh_basis(normals.row(i).transpose());
    double s = 0.0;
    for (int k = 0; k < 9; ++k) s += gamma(k) * y[k];
    out(i) = s;
  }
  return out;
}

}  // namespace at3d::render
