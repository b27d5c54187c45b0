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

#include "at3d/harness/curvature_table.hpp"

#include <cstdio>

#include "at3d/mesh/curvature.hpp"
#include "at3d/mesh/obj_io.hpp"

namespace at3d::harness {

std::vector<CurvatureRow> curvature_table(const std::vector<std::string>& mesh_paths,
                                          const std::vector<double>& radii) {
  std::vector<CurvatureRow> rows;
  for (const auto& path : mesh_paths) {
    mesh::Mesh m;
    try {
      m = mesh::compact(mesh::load_obj(path));
    } catch (const std::exception& e) {
      rows.push_back({path, 0.0, 0.0, 0, e.what()});
      continue;
    }
    for (double r : radii) {
      CurvatureRow row{path, r, 0.0, 0, ""};
      try {
        const auto report = mesh::curvature_report(m, r, true);
        row.average_measure = report.average_measure;
        row.interior_vertices = report.evaluated_count;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string curvature_csv(const std::vector<CurvatureRow>& rows) {
  std::string out = "mesh,radius,average_measure,interior_vertices,error\n";
  char buf[64];
  for (const auto& r : rows) {
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    out += r.mesh + ",";
    std::snprintf(buf, sizeof buf, "%.17g,", r.radius);
    out += buf;
    std::snprintf(buf, sizeof buf, "%.17g,", r.average_measure);
    out += buf;
    out += std::to_string(r.interior_vertices) + "," + err + "\n";
  }
  return out;
}

}  // namespace at3d::harness
