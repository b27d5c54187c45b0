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

#include "at3d/mesh/mesh.hpp"

namespace at3d::mesh {

struct CurvatureReport {
  std::vector<double> per_vertex_defect;
  double ball_radius = 0.0;
  std::vector<double> per_vertex_ball_measure;
  double average_measure = 0.0;
  bool interior_only = true;
  int evaluated_count = 0;  // |P|; not serialized

  std::string to_json() const;
};

// 2*pi minus the sum of incident corner angles. Boundary vertices use the
// pi - sum convention when interior_only is false; with interior_only set a
// boundary vertex is rejected (kInvalidArgument). Isolated vertices throw
// kIsolatedVertex.
double angle_defect(const Mesh& mesh, int vertex, bool interior_only);

// Angle defect for every vertex (boundary vertices with the pi - sum
// convention, isolated vertices 0), computed in one pass over the faces.
std::vector<double> angle_defects(const Mesh& mesh);

// Sum of angle defects of every vertex within distance r of `center`
// (inclusive). With interior_only the sum ranges over interior vertices only;
// otherwise over all referenced vertices, boundary ones contributing pi - sum.
double curvature_ball_measure(const Mesh& mesh, int center, double r,
                              bool interior_only = false);

// Mean over evaluated vertices P of |sum of g(p') over p' in P, |p' - p| <= r|.
// P is the interior vertex set when interior_only, else every referenced
// vertex. Throws kInvalidArgument for r <= 0 and kIsolatedVertex when P is empty.
CurvatureReport curvature_report(const Mesh& mesh, double r,
                                 bool interior_only = true);

double average_curvature(const Mesh& mesh, double r, bool interior_only = true);

}  // namespace at3d::mesh
