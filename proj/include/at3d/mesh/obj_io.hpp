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

#include <string>

#include "at3d/mesh/mesh.hpp"

namespace at3d::mesh {

// Wavefront OBJ, triangles only. Vertex colors are written as `v x y z r g b`
// with r, g, b in [0, 1]; loading accepts 3- or 6-float vertex lines (missing
// colors load as 0). `f` entries may use the `i/t/n` forms; only the position
// index is read.
void save_obj(const Mesh& mesh, const std::string& path);
Mesh load_obj(const std::string& path);

}  // namespace at3d::mesh
