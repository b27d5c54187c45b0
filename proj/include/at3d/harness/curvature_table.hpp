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
#include <vector>

namespace at3d::harness {

struct CurvatureRow {
  std::string mesh;
  double radius = 0.0;
  double average_measure = 0.0;
  int interior_vertices = 0;
  std::string error;  // set when the mesh failed to load or evaluate
};

// Interior-vertex average curvature of every mesh at every radius. Per-file
// failures become rows with `error` set.
std::vector<CurvatureRow> curvature_table(const std::vector<std::string>& mesh_paths,
                                          const std::vector<double>& radii);
// CSV: mesh,radius,average_measure,interior_vertices,error
std::string curvature_csv(const std::vector<CurvatureRow>& rows);

}  // namespace at3d::harness
