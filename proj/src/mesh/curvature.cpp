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

#include "at3d/mesh/curvature.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "at3d/core/error.hpp"

namespace at3d::mesh {

namespace {

constexpr double kPi = std::numbers::pi;

double corner_angle(const Vec3& apex, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - apex;
  const Vec3 v = b - apex;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

std::vector<double> angle_sums(const Mesh& mesh) {
  std::vector<double> sums(mesh.vertex_count(), 0.0);
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    const auto face = mesh.faces.row(f);
    for (int k = 0; k < 3; ++k) {
      const Vec3 apex = mesh.positions.row(face(k));
      const Vec3 a = mesh.positions.row(face((k + 1) % 3));
      const Vec3 b = mesh.positions.row(face((k + 2) % 3));
      sums[face(k)] += corner_angle(apex, a, b);
    }
  }
  return sums;
}

// Uniform cell grid over a point subset with cell edge r.
class BallIndex {
 public:
  BallIndex(const VertexMatrix& points, const std::vector<int>& subset, double r)
      : points_(points), r_(r) {
    for (int i : subset) cells_[cell_of(points.row(i).transpose())].push_back(i);
  }

  template <typename Fn>
  void for_each_within(const Vec3& center, Fn&& fn) const {
    const auto c = cell_of(center);
    const double r2 = r_ * r_;
    for (std::int64_t dz = -1; dz <= 1; ++dz)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          auto it = cells_.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == cells_.end()) continue;
          for (int j : it->second) {
            if ((points_.row(j).transpose() - center).squaredNorm() <= r2) fn(j);
          }
        }
  }

 private:
  using Cell = std::array<std::int64_t, 3>;

  Cell cell_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / r_)),
            static_cast<std::int64_t>(std::floor(p.y() / r_)),
            static_cast<std::int64_t>(std::floor(p.z() / r_))};
  }

  const VertexMatrix& points_;
  double r_;
  std::map<Cell, std::vector<int>> cells_;
};

}  // namespace

std::vector<double> angle_defects(const Mesh& mesh) {
  const auto n = mesh.vertex_count();
  const auto sums = angle_sums(mesh);
  const auto boundary = boundary_vertices(mesh.faces, n);
  const auto incident = incident_face_counts(mesh.faces, n);
  std::vector<double> defects(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (incident[i] == 0) continue;
    defects[i] = (boundary[i] ? kPi : 2.0 * kPi) - sums[i];
  }
  return defects;
}

double angle_defect(const Mesh& mesh, int vertex, bool interior_only) {
  require(vertex >= 0 && static_cast<std::size_t>(vertex) < mesh.vertex_count(),
          ErrorCode::kInvalidArgument,
          "angle_defect: vertex " + std::to_string(vertex) + " out of range");
  const auto incident = incident_face_counts(mesh.faces, mesh.vertex_count());
  require(incident[vertex] > 0, ErrorCode::kIsolatedVertex,
          "angle_defect: vertex " + std::to_string(vertex) + " is isolated");
  const bool boundary = boundary_vertices(mesh.faces, mesh.vertex_count())[vertex];
  require(!(boundary && interior_only), ErrorCode::kInvalidArgument,
          "angle_defect: vertex " + std::to_string(vertex) +
              " is on the boundary and interior_only is set");
  return (boundary ? kPi : 2.0 * kPi) - angle_sums(mesh)[vertex];
}

double curvature_ball_measure(const Mesh& mesh, int center, double r,
                              bool interior_only) {
  require(r > 0.0, ErrorCode::kInvalidArgument,
          "curvature_ball_measure: radius must be positive");
  require(center >= 0 && static_cast<std::size_t>(center) < mesh.vertex_count(),
          ErrorCode::kInvalidArgument, "curvature_ball_measure: bad center index");
  const auto n = mesh.vertex_count();
  const auto incident = incident_face_counts(mesh.faces, n);
  require(incident[center] > 0, ErrorCode::kIsolatedVertex,
          "curvature_ball_measure: center vertex is isolated");
  const auto boundary = boundary_vertices(mesh.faces, n);
  const auto defects = angle_defects(mesh);
  const Vec3 c = mesh.positions.row(center);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (incident[j] == 0 || (interior_only && boundary[j])) continue;
    if ((mesh.positions.row(j).transpose() - c).squaredNorm() <= r * r)
      total += defects[j];
  }
  return total;
}

CurvatureReport curvature_report(const Mesh& mesh, double r, bool interior_only) {
  require(r > 0.0, ErrorCode::kInvalidArgument,
          "average_curvature: radius must be positive");
  const auto n = mesh.vertex_count();
  const auto incident = incident_face_counts(mesh.faces, n);
  const auto boundary = boundary_vertices(mesh.faces, n);

  std::vector<int> evaluated;
  for (std::size_t i = 0; i < n; ++i) {
    if (incident[i] > 0 && !(interior_only && boundary[i]))
      evaluated.push_back(static_cast<int>(i));
  }
  require(!evaluated.empty(), ErrorCode::kIsolatedVertex,
          "average_curvature: no vertex to evaluate");

  CurvatureReport report;
  report.per_vertex_defect = angle_defects(mesh);
  report.ball_radius = r;
  report.interior_only = interior_only;
  report.per_vertex_ball_measure.assign(n, 0.0);
  report.evaluated_count = static_cast<int>(evaluated.size());

  const BallIndex index(mesh.positions, evaluated, r);
  double sum_abs = 0.0;
  for (int i : evaluated) {
    double measure = 0.0;
    index.for_each_within(mesh.positions.row(i).transpose(),
                          [&](int j) { measure += report.per_vertex_defect[j]; });
    report.per_vertex_ball_measure[i] = measure;
    sum_abs += std::abs(measure);
  }
  report.average_measure = sum_abs / static_cast<double>(evaluated.size());
  return report;
}

double average_curvature(const Mesh& mesh, double r, bool interior_only) {
  return curvature_report(mesh, r, interior_only).average_measure;
}

std::string CurvatureReport::to_json() const {
  nlohmann::json j;
  j["per_vertex_defect"] = per_vertex_defect;
  j["ball_radius"] = ball_radius;
  j["per_vertex_ball_measure"] = per_vertex_ball_measure;
  j["average_measure"] = average_measure;
  j["interior_only"] = interior_only;
  return j.dump();
}

}  // namespace at3d::mesh
