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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "at3d/core/error.hpp"
#include "at3d/harness/finite_difference.hpp"
#include "at3d/mesh/curvature.hpp"
#include "at3d/mesh/obj_io.hpp"
#include "at3d/mesh/patch.hpp"
#include "at3d/mesh/regularizers.hpp"
#include "at3d/morphable/morphable_model.hpp"
#include "nlohmann/json.hpp"
#include "../common/oracles.hpp"
#include "../common/test_support.hpp"

using namespace at3d;
using namespace at3d::testing;
using std::numbers::pi;

namespace {

mesh::Mesh canonical_face(int res) {
  const auto model = morphable::generate_synthetic_model(7, res);
  mesh::Mesh m;
  m.positions = model.mean_shape;
  m.colors = model.mean_texture;
  m.faces = model.faces;
  return m;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("at3d_test_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("mesh validation rejects broken meshes") {
  mesh::Mesh m = regular_tetrahedron();
  CHECK_NOTHROW(mesh::validate(m));
  mesh::Mesh bad = m;
  bad.faces(0, 1) = 4;
  CHECK_THROWS_AS(mesh::validate(bad), Error);
  bad = m;
  bad.faces(0, 1) = bad.faces(0, 0);
  CHECK_THROWS_AS(mesh::validate(bad), Error);
  bad = m;
  bad.colors(2, 0) = 256.0;
  CHECK_THROWS_AS(mesh::validate(bad), Error);
}

TEST_CASE("angle defect on reference solids") {
  const mesh::Mesh cube = unit_cube();
  for (int v = 0; v < 8; ++v) CHECK(mesh::angle_defect(cube, v, true) == doctest::Approx(pi / 2).epsilon(1e-14));
  const mesh::Mesh tet = regular_tetrahedron();
  for (int v = 0; v < 4; ++v) CHECK(mesh::angle_defect(tet, v, true) == doctest::Approx(pi).epsilon(1e-14));

  const mesh::Mesh grid = mesh::make_grid(5, 5, 1.0);
  CHECK(std::abs(mesh::angle_defect(grid, 12, true)) < 1e-12);
  CHECK_THROWS_AS(mesh::angle_defect(grid, 0, true), Error);
  // Corner of the grid: a single right angle (the anti-diagonal splits the
  // other corner), pi - pi/2.
  CHECK(mesh::angle_defect(grid, 0, false) == doctest::Approx(pi / 2));

  mesh::Mesh isolated = regular_tetrahedron();
  isolated.positions.conservativeResize(5, 3);
  isolated.colors.conservativeResize(5, 3);
  isolated.positions.row(4) << 5, 5, 5;
  isolated.colors.row(4) << 0, 0, 0;
  try {
    mesh::angle_defect(isolated, 4, true);
    FAIL("expected an isolated-vertex error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIsolatedVertex);
  }
}

TEST_CASE("Gauss-Bonnet on closed meshes") {
  for (int level : {0, 1, 2, 3}) {
    const mesh::Mesh s = icosphere(level);
    const auto d = mesh::angle_defects(s);
    double total = 0.0;
    for (double x : d) total += x;
    CHECK(std::abs(total - 4 * pi) < 1e-6);
    // A ball wider than the mesh collects everything.
    CHECK(std::abs(mesh::curvature_ball_measure(s, 0, 3.0) - 4 * pi) < 1e-6);
  }
  const mesh::Mesh cube = unit_cube();
  CHECK(std::abs(mesh::curvature_ball_measure(cube, 3, 10.0) - 4 * pi) < 1e-12);
}

TEST_CASE("ball measure and average curvature, direct cases") {
  const mesh::Mesh cube = unit_cube();
  // Radius below the edge length isolates every vertex.
  CHECK(mesh::curvature_ball_measure(cube, 0, 0.5) == doctest::Approx(pi / 2));
  CHECK(mesh::average_curvature(cube, 0.5) == doctest::Approx(pi / 2));
  // Radius 1 reaches the three edge neighbours.
  CHECK(mesh::curvature_ball_measure(cube, 0, 1.0) == doctest::Approx(2 * pi));

  const mesh::Mesh grid = mesh::make_grid(9, 9, 1.5);
  CHECK(std::abs(mesh::curvature_ball_measure(grid, 40, 3.0, true)) < 1e-9);
  CHECK(mesh::average_curvature(grid, 1.5, true) < 1e-9);
  CHECK(mesh::average_curvature(grid, 6.0, true) < 1e-9);

  // One bumped interior vertex: a ball smaller than the spacing holds only
  // its centre, so the average is the mean |defect| over interior vertices.
  mesh::Mesh bump = mesh::make_grid(7, 7, 1.0);
  bump.positions(24, 2) = 0.3;
  const auto report = mesh::curvature_report(bump, 0.5, true);
  CHECK(report.evaluated_count == 25);
  CHECK(mesh::angle_defect(bump, 24, true) > 0.0);
  const Oracle o = oracle_defects(bump);
  double sum = 0.0;
  for (int v = 0; v < 49; ++v)
    if (!o.boundary[v]) sum += std::abs(o.defect[v]);
  CHECK(report.average_measure == doctest::Approx(sum / 25.0).epsilon(1e-12));

  CHECK_THROWS_AS(mesh::average_curvature(grid, 0.0), Error);
}

TEST_CASE("average curvature matches the brute-force oracle on the face mesh") {
  for (int res : {16, 24}) {
    const mesh::Mesh face = canonical_face(res);
    for (double r : {3.0, 8.0, 20.0}) {
      CHECK(std::abs(mesh::average_curvature(face, r, true) - brute_average(face, r, true)) < 1e-9);
      CHECK(std::abs(mesh::average_curvature(face, r, false) - brute_average(face, r, false)) < 1e-9);
    }
    // Patch sub-mesh: boundary vertices excluded by the interior-only default.
    const auto patch = mesh::extract_patch(face, mesh::Region::kEyeNose);
    const mesh::Mesh sub = mesh::compact(mesh::with_topology(face, patch));
    CHECK(std::abs(mesh::average_curvature(sub, 10.0) - brute_average(sub, 10.0, true)) < 1e-9);
  }
}

TEST_CASE("curvature report fields and JSON") {
  const mesh::Mesh face = canonical_face(16);
  const auto r = mesh::curvature_report(face, 12.0, true);
  double mean = 0.0;
  int count = 0;
  const auto boundary = mesh::boundary_vertices(face.faces, face.vertex_count());
  for (std::size_t i = 0; i < face.vertex_count(); ++i)
    if (!boundary[i]) {
      mean += std::abs(r.per_vertex_ball_measure[i]);
      ++count;
    }
  CHECK(count == r.evaluated_count);
  CHECK(r.average_measure == doctest::Approx(mean / count).epsilon(1e-12));
  const auto j = nlohmann::json::parse(r.to_json());
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  CHECK(keys == std::set<std::string>{"per_vertex_defect", "ball_radius", "per_vertex_ball_measure",
                                      "average_measure", "interior_only"});
}

TEST_CASE("average curvature is invariant under rigid motion") {
  mesh::Mesh face = canonical_face(16);
  const double before = mesh::average_curvature(face, 15.0);
  Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (Eigen::Index i = 0; i < face.positions.rows(); ++i) {
    Vec3 p = face.positions.row(i).transpose();
    face.positions.row(i) = (R * p + Vec3(10, -4, 250)).transpose();
  }
  CHECK(std::abs(mesh::average_curvature(face, 15.0) - before) < 1e-9);
}

TEST_CASE("patch extraction") {
  const mesh::Mesh face = canonical_face(32);
  const auto all = mesh::extract_patch(face, mesh::VertexPredicate([](const Vec3&) { return true; }));
  CHECK(all.face_count() == face.face_count());
  try {
    mesh::extract_patch(face, mesh::VertexPredicate([](const Vec3&) { return false; }));
    FAIL("expected an empty-patch error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyPatch);
  }

  for (auto region : {mesh::Region::kEye, mesh::Region::kEyeNose, mesh::Region::kRespirator}) {
    const auto patch = mesh::extract_patch(face, region);
    // Brute-force count straight from the region volumes.
    auto inside = [&](int v) {
      const double x = face.positions(v, 0), y = face.positions(v, 1);
      const bool eye = y >= -55.0 && y <= -10.0 && std::abs(x) <= 65.0;
      const bool nose = y >= -15.0 && y <= 40.0 && std::abs(x) <= 10.0 + 0.25 * (y + 15.0);
      const double ex = x / 62.0, ey = (y - 55.0) / 50.0;
      const bool resp = y >= 15.0 && ex * ex + ey * ey <= 1.0;
      switch (region) {
        case mesh::Region::kEye: return eye;
        case mesh::Region::kEyeNose: return eye || nose;
        default: return resp;
      }
    };
    std::set<std::array<int, 3>> expected;
    std::set<int> verts;
    for (Eigen::Index f = 0; f < face.faces.rows(); ++f)
      if (inside(face.faces(f, 0)) && inside(face.faces(f, 1)) && inside(face.faces(f, 2))) {
        expected.insert({face.faces(f, 0), face.faces(f, 1), face.faces(f, 2)});
        for (int k = 0; k < 3; ++k) verts.insert(face.faces(f, k));
      }
    CHECK(patch.face_count() == expected.size());
    std::set<std::array<int, 3>> got;
    for (Eigen::Index f = 0; f < patch.faces.rows(); ++f)
      got.insert({patch.faces(f, 0), patch.faces(f, 1), patch.faces(f, 2)});
    CHECK(got == expected);
    CHECK(std::vector<int>(verts.begin(), verts.end()) == patch.kept_vertices);
    CHECK(patch.region == region);
    // Idempotent.
    CHECK(mesh::extract_patch(face, region).faces == patch.faces);
  }
  CHECK(mesh::parse_region("EyeNose") == mesh::Region::kEyeNose);
  CHECK_THROWS_AS(mesh::parse_region("Mouth"), Error);
}

TEST_CASE("compact keeps referenced vertices in order") {
  const mesh::Mesh face = canonical_face(16);
  const auto patch = mesh::extract_patch(face, mesh::Region::kEye);
  std::vector<int> old;
  const mesh::Mesh sub = mesh::compact(mesh::with_topology(face, patch), &old);
  CHECK(old == patch.kept_vertices);
  CHECK(sub.face_count() == patch.face_count());
  for (Eigen::Index f = 0; f < sub.faces.rows(); ++f)
    for (int k = 0; k < 3; ++k) CHECK(old[sub.faces(f, k)] == patch.faces(f, k));
}

TEST_CASE("chamfer distance") {
  VertexMatrix a(1, 3), b(1, 3);
  a << 0, 0, 0;
  b << 1, 0, 0;
  CHECK(mesh::chamfer_distance(a, b) == doctest::Approx(2.0));
  CHECK(mesh::chamfer_distance(a, a) == 0.0);

  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    VertexMatrix p(20, 3), q(17, 3);
    flatten(p) = random_vector(60, rng, -2, 2);
    flatten(q) = random_vector(51, rng, -2, 2);
    auto nearest = [](const VertexMatrix& from, const VertexMatrix& to) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < from.rows(); ++i) {
        double best = 1e300;
        for (Eigen::Index j = 0; j < to.rows(); ++j)
          best = std::min(best, (from.row(i) - to.row(j)).squaredNorm());
        s += best;
      }
      return s / from.rows();
    };
    const double brute = nearest(p, q) + nearest(q, p);
    CHECK(mesh::chamfer_distance(p, q) == doctest::Approx(brute).epsilon(1e-12));
    CHECK(mesh::chamfer_distance(p, q) == doctest::Approx(mesh::chamfer_distance(q, p)).epsilon(1e-12));

    VertexMatrix g;
    mesh::chamfer_distance(p, q, &g);
    const auto fd = fd_scalar(
        [&](const VectorX& x) {
          VertexMatrix t(20, 3);
          flatten(t) = x;
          return mesh::chamfer_distance(t, q);
        },
        flatten(p), flatten(g), 1e-6);
    CHECK(fd.max_relative_error < 1e-4);
  }
  CHECK_THROWS_AS(mesh::chamfer_distance(VertexMatrix(0, 3), b), Error);
}

TEST_CASE("laplacian loss") {
  // Interior vertices of a flat grid sit at the mean of their 1-ring.
  const mesh::Mesh grid = mesh::make_grid(6, 4, 1.0);
  CHECK(mesh::laplacian_loss(grid, true) < 1e-24);

  // One displaced interior vertex: brute-force formula over the interior set.
  mesh::Mesh bumped = mesh::make_grid(5, 5, 1.0);
  bumped.positions.row(12) += Vec3(0.1, -0.2, 0.3).transpose();
  const auto nb = mesh::vertex_neighbors(bumped.faces, 25);
  const auto boundary = mesh::boundary_vertices(bumped.faces, 25);
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < 25; ++i) {
    if (boundary[i]) continue;
    Vec3 mean = Vec3::Zero();
    for (int j : nb[i]) mean += bumped.positions.row(j).transpose();
    mean /= static_cast<double>(nb[i].size());
    sum += (bumped.positions.row(i).transpose() - mean).squaredNorm();
    ++count;
  }
  CHECK(mesh::laplacian_loss(bumped, true) == doctest::Approx(sum / count).epsilon(1e-12));

  // Octahedron: every vertex has 4 neighbours whose mean is the origin.
  const mesh::Mesh oct = regular_octahedron();
  CHECK(mesh::laplacian_loss(oct) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(5);
  mesh::Mesh face = canonical_face(12);
  flatten(face.positions) += random_vector(face.positions.size(), rng, -1, 1);
  VertexMatrix g;
  const double l = mesh::laplacian_loss(face, false, &g);
  CHECK(l >= 0.0);
  const auto fd = fd_scalar(
      [&](const VectorX& x) {
        mesh::Mesh t = face;
        flatten(t.positions) = x;
        return mesh::laplacian_loss(t, false);
      },
      flatten(face.positions), flatten(g), 1e-5);
  CHECK(fd.max_relative_error < 1e-4);
}

TEST_CASE("edge length loss") {
  const mesh::Mesh grid = mesh::make_grid(4, 4, 1.0);
  CHECK(mesh::edge_length_loss(grid, grid) == 0.0);
  // Axis-aligned edges have unit length; diagonals sqrt(2). Doubling the
  // scale gives (2|e| - |e|)^2 = |e|^2 per edge.
  mesh::Mesh twice = grid;
  twice.positions *= 2.0;
  const auto edges = mesh::unique_edges(grid.faces);
  double expected = 0.0;
  for (const auto& [a, b] : edges) expected += (grid.positions.row(a) - grid.positions.row(b)).squaredNorm();
  CHECK(mesh::edge_length_loss(twice, grid) == doctest::Approx(expected / edges.size()));
  // Equilateral unit triangle scaled by 2: every edge contributes 1.
  mesh::Mesh tri = make_mesh({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}}, {{0, 1, 2}});
  mesh::Mesh tri2 = tri;
  tri2.positions *= 2.0;
  CHECK(mesh::edge_length_loss(tri2, tri) == doctest::Approx(1.0));

  Rng rng(9);
  mesh::Mesh moved = canonical_face(12);
  const mesh::Mesh ref = moved;
  flatten(moved.positions) += random_vector(moved.positions.size(), rng, -2, 2);
  double brute = 0.0;
  std::set<std::pair<int, int>> seen;
  for (Eigen::Index f = 0; f < ref.faces.rows(); ++f)
    for (int k = 0; k < 3; ++k) {
      auto e = std::minmax(ref.faces(f, k), ref.faces(f, (k + 1) % 3));
      if (!seen.insert(e).second) continue;
      const double d = (moved.positions.row(e.first) - moved.positions.row(e.second)).norm() -
                       (ref.positions.row(e.first) - ref.positions.row(e.second)).norm();
      brute += d * d;
    }
  VertexMatrix g;
  CHECK(mesh::edge_length_loss(moved, ref, &g) == doctest::Approx(brute / seen.size()).epsilon(1e-12));
  const auto fd = fd_scalar(
      [&](const VectorX& x) {
        mesh::Mesh t = moved;
        flatten(t.positions) = x;
        return mesh::edge_length_loss(t, ref);
      },
      flatten(moved.positions), flatten(g), 1e-5);
  CHECK(fd.max_relative_error < 1e-4);

  mesh::Mesh other = ref;
  other.faces.conservativeResize(other.faces.rows() - 1, 3);
  try {
    mesh::edge_length_loss(moved, other);
    FAIL("expected a topology mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTopologyMismatch);
  }
}

TEST_CASE("OBJ round trip and malformed files") {
  mesh::Mesh tet = regular_tetrahedron();
  tet.colors << 0, 64, 255, 12.5, 100, 200, 255, 255, 255, 1, 2, 3;
  const std::string path = temp_path("tet.obj");
  mesh::save_obj(tet, path);
  const mesh::Mesh back = mesh::load_obj(path);
  CHECK(back.faces == tet.faces);
  CHECK(max_abs_diff(back.positions, tet.positions) < 1e-6);
  CHECK(max_abs_diff(back.colors, tet.colors) < 1e-6);

  auto expect_malformed = [](const std::string& text, const std::string& where) {
    const std::string p = temp_path("bad.obj");
    write_file(p, text);
    try {
      mesh::load_obj(p);
      FAIL("expected a malformed-file error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMalformedFile);
      CHECK(std::string(e.what()).find(where) != std::string::npos);
    }
  };
  expect_malformed("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n", ":4");
  expect_malformed("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n", ":5");
  expect_malformed("v 0 0 0\nv 1 0 0\nf 1 2 3\n", ":3");
  expect_malformed("v 0 0\n", ":1");

  // Slash forms and negative indices; plain "v x y z" lines get grey.
  const std::string p = temp_path("forms.obj");
  write_file(p, "# c\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 -1/1\n");
  const mesh::Mesh m = mesh::load_obj(p);
  CHECK(m.face_count() == 1);
  CHECK(m.faces(0, 2) == 2);
  try {
    mesh::load_obj(temp_path("missing_dir/none.obj"));
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}
