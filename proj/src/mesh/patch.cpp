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

#include "at3d/mesh/patch.hpp"

#include <algorithm>
#include <cmath>

#include "at3d/core/error.hpp"

namespace at3d::mesh {

namespace {

using F = FaceFrame;

bool in_eye_band(const Vec3& p) {
  return p.y() >= F::kEyeY - 25.0 && p.y() <= F::kEyeY + 20.0 &&
         std::abs(p.x()) <= 65.0;
}

// Nose wedge: widens from the bridge toward the nostrils.
bool in_nose(const Vec3& p) {
  const double y = p.y();
  if (y < F::kEyeY + 15.0 || y > 40.0) return false;
  const double half_width = 10.0 + 0.25 * (y - (F::kEyeY + 15.0));
  return std::abs(p.x()) <= half_width;
}

bool in_respirator(const Vec3& p) {
  if (p.y() < 15.0) return false;
  const double ex = p.x() / 62.0;
  const double ey = (p.y() - 55.0) / 50.0;
  return ex * ex + ey * ey <= 1.0;
}

}  // namespace

const char* region_name(Region region) {
  switch (region) {
    case Region::kEye: return "Eye";
    case Region::kEyeNose: return "EyeNose";
    case Region::kRespirator: return "Respirator";
    case Region::kCustom: return "Custom";
  }
  return "Custom";
}

Region parse_region(const std::string& name) {
  if (name == "Eye") return Region::kEye;
  if (name == "EyeNose") return Region::kEyeNose;
  if (name == "Respirator") return Region::kRespirator;
  fail(ErrorCode::kInvalidArgument, "unknown patch region '" + name +
                                        "' (expected Eye, EyeNose, Respirator)");
}

bool in_region(Region region, const Vec3& p) {
  switch (region) {
    case Region::kEye: return in_eye_band(p);
    case Region::kEyeNose: return in_eye_band(p) || in_nose(p);
    case Region::kRespirator: return in_respirator(p);
    case Region::kCustom: break;
  }
  fail(ErrorCode::kInvalidArgument,
       "in_region: Custom regions need a vertex predicate");
}

PatchTopology extract_patch(const Mesh& mesh, const RegionSpec& region) {
  const auto n = mesh.positions.rows();
  std::vector<char> accepted(static_cast<std::size_t>(n));
  Region id = Region::kCustom;
  if (const auto* r = std::get_if<Region>(&region)) {
    id = *r;
    for (Eigen::Index i = 0; i < n; ++i)
      accepted[i] = in_region(*r, mesh.positions.row(i).transpose());
  } else {
    const auto& pred = std::get<VertexPredicate>(region);
    for (Eigen::Index i = 0; i < n; ++i)
      accepted[i] = pred(mesh.positions.row(i).transpose());
  }

  std::vector<Eigen::Index> kept_faces;
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    const auto face = mesh.faces.row(f);
    if (accepted[face(0)] && accepted[face(1)] && accepted[face(2)])
      kept_faces.push_back(f);
  }
  require(!kept_faces.empty(), ErrorCode::kEmptyPatch,
          std::string("extract_patch: no face of region ") + region_name(id) +
              " survives");

  PatchTopology patch;
  patch.region = id;
  patch.faces.resize(static_cast<Eigen::Index>(kept_faces.size()), 3);
  for (std::size_t k = 0; k < kept_faces.size(); ++k)
    patch.faces.row(k) = mesh.faces.row(kept_faces[k]);
  patch.kept_vertices.assign(patch.faces.data(),
                             patch.faces.data() + patch.faces.size());
  std::sort(patch.kept_vertices.begin(), patch.kept_vertices.end());
  patch.kept_vertices.erase(
      std::unique(patch.kept_vertices.begin(), patch.kept_vertices.end()),
      patch.kept_vertices.end());
  return patch;
}

PatchTopology full_topology(const Mesh& mesh) {
  return extract_patch(mesh, VertexPredicate([](const Vec3&) { return true; }));
}

Mesh with_topology(const Mesh& mesh, const PatchTopology& patch) {
  Mesh out;
  out.positions = mesh.positions;
  out.colors = mesh.colors;
  out.faces = patch.faces;
  return out;
}

}  // namespace at3d::mesh
