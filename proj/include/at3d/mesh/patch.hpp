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

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "at3d/mesh/mesh.hpp"

namespace at3d::mesh {

enum class Region { kEye, kEyeNose, kRespirator, kCustom };

const char* region_name(Region region);
Region parse_region(const std::string& name);  // "Eye", "EyeNose", "Respirator"

// Canonical face frame (model units): x to the subject's left in the image
// (image right), y down, z away from the camera. The face occupies
// |x| <= kHalfWidth, |y| <= kHalfHeight and bulges toward -z.
struct FaceFrame {
  static constexpr double kHalfWidth = 80.0;
  static constexpr double kHalfHeight = 100.0;
  static constexpr double kEyeX = 30.0;   // |x| of the eye centers
  static constexpr double kEyeY = -30.0;  // y of the eye centers
};

using VertexPredicate = std::function<bool(const Vec3&)>;
using RegionSpec = std::variant<Region, VertexPredicate>;

// Canonical-coordinate test for the built-in regions. kCustom is rejected.
bool in_region(Region region, const Vec3& p);

// Face subset F' of a parent mesh. Faces keep parent vertex indices.
struct PatchTopology {
  FaceMatrix faces;
  std::vector<int> kept_vertices;  // sorted, unique
  Region region = Region::kCustom;

  std::size_t face_count() const { return static_cast<std::size_t>(faces.rows()); }
};

// Keeps the faces whose three vertices all satisfy the region predicate.
// Throws kEmptyPatch when nothing survives.
PatchTopology extract_patch(const Mesh& mesh, const RegionSpec& region);

// Patch covering every face of `mesh`.
PatchTopology full_topology(const Mesh& mesh);

// Mesh sharing `mesh`'s vertex arrays with the patch's face list.
Mesh with_topology(const Mesh& mesh, const PatchTopology& patch);

}  // namespace at3d::mesh
