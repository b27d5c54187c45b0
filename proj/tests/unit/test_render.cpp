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

#include <cmath>
#include <filesystem>
#include <limits>

#include "at3d/core/error.hpp"
#include "at3d/morphable/morphable_model.hpp"
#include "at3d/render/camera.hpp"
#include "at3d/render/image_io.hpp"
#include "at3d/render/rasterizer.hpp"
#include "at3d/render/sh.hpp"
#include "../common/oracles.hpp"
#include "../common/test_support.hpp"

using namespace at3d;
using namespace at3d::testing;

TEST_CASE("rasterizer agrees with a brute-force ray caster on random scenes") {
  const int size = 32;
  const auto params = frontal_params(size);
  Rng rng(2024);
  int covered_total = 0;
  for (int scene = 0; scene < 100; ++scene) {
    VertexMatrix pos(30, 3), col(30, 3);
    FaceMatrix faces(10, 3);
    for (int f = 0; f < 10; ++f) {
      const double cx = rng.uniform(-60, 60), cy = rng.uniform(-60, 60), cz = rng.uniform(-40, 40);
      const double spread = rng.uniform(10, 70);
      for (int k = 0; k < 3; ++k) {
        pos.row(3 * f + k) << cx + rng.uniform(-spread, spread), cy + rng.uniform(-spread, spread),
            cz + rng.uniform(-spread, spread) * 0.5;
        col.row(3 * f + k) << rng.uniform(0, 255), rng.uniform(0, 255), rng.uniform(0, 255);
      }
      faces.row(f) << 3 * f, 3 * f + 1, 3 * f + 2;
    }
    const auto out = render::rasterize(pos, col, all_faces(faces), params);
    VertexMatrix cam = pos;
    cam.col(2).array() += 550.0;
    const auto brute = brute_force(cam, col, faces, params.focal, size, size);
    CHECK(out.face_id == brute.face_id);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.image.size(); ++i)
      worst = std::max(worst, std::abs(out.image.data[i] - brute.image.data[i]));
    CHECK(worst < 1e-9);
    for (std::size_t p = 0; p < out.face_id.size(); ++p) {
      CHECK((out.mask.data[p] != 0) == (out.face_id[p] >= 0));
      covered_total += out.face_id[p] >= 0;
    }
  }
  // Roughly a tenth of all pixels end up covered; guards against empty scenes.
  CHECK(covered_total > 100 * 32 * 32 / 20);
}

TEST_CASE("shared edges are owned by exactly one triangle") {
  // A square split along its diagonal, edges passing through pixel centres.
  const int size = 16;
  auto params = frontal_params(size);
  params.focal = 550.0;  // one model unit per pixel
  VertexMatrix pos(4, 3), col = VertexMatrix::Constant(4, 3, 100.0);
  pos << -4.5, -4.5, 0, 3.5, -4.5, 0, 3.5, 3.5, 0, -4.5, 3.5, 0;
  FaceMatrix faces(2, 3);
  faces << 0, 1, 2, 0, 2, 3;
  const auto out = render::rasterize(pos, col, all_faces(faces), params);
  // Pixel centres x+0.5-8 in [-4.5, 3.5]: columns 0..8 touched, with the
  // right and bottom edges excluded by the top-left rule.
  int covered = 0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) covered += out.mask.at(x, y) != 0;
  CHECK(covered == 64);
  CHECK(out.mask.at(3, 3) == 1);
  CHECK(out.mask.at(11, 3) == 0);
  CHECK(out.mask.at(3, 11) == 0);
  // Diagonal pixel centres belong to one face each, never dropped.
  for (int k = 0; k < 8; ++k) CHECK(out.face_id[static_cast<std::size_t>(k + 3) * size + k + 3] >= 0);
}

TEST_CASE("composite identities are bit-exact") {
  Rng rng(8);
  render::RenderOutput r;
  r.width = r.height = 8;
  r.image = Image(8, 8);
  r.mask = Mask(8, 8, 0);
  Image attacker(8, 8);
  for (auto& v : r.image.data) v = rng.uniform(0, 255);
  for (auto& v : attacker.data) v = rng.uniform(0, 255);
  CHECK(render::composite(r, attacker).data == attacker.data);
  r.mask = Mask(8, 8, 1);
  CHECK(render::composite(r, attacker).data == r.image.data);
  r.mask.at(2, 5) = 0;
  const Image mixed = render::composite(r, attacker);
  CHECK(mixed.at(2, 5, 1) == attacker.at(2, 5, 1));
  CHECK(mixed.at(3, 5, 1) == r.image.at(3, 5, 1));
  CHECK_THROWS_AS(render::composite(r, Image(4, 4)), Error);
}

TEST_CASE("spherical harmonics basis and shading") {
  const Vec3 n = Vec3(0.3, -0.5, 0.8).normalized();
  const auto y = render::sh_basis(n);
  CHECK(y[0] == doctest::Approx(0.5 / std::sqrt(M_PI)));
  CHECK(y[1] == doctest::Approx(std::sqrt(3.0 / (4 * M_PI)) * n.y()));
  CHECK(y[3] == doctest::Approx(std::sqrt(3.0 / (4 * M_PI)) * n.x()));
  CHECK(y[6] == doctest::Approx(0.25 * std::sqrt(5.0 / M_PI) * (3 * n.z() * n.z() - 1)));
  CHECK(y[8] == doctest::Approx(0.25 * std::sqrt(15.0 / M_PI) * (n.x() * n.x() - n.y() * n.y())));
  VertexMatrix normals(1, 3);
  normals.row(0) = n.transpose();
  CHECK(render::sh_shade(normals, morphable::ambient_illumination())(0) == doctest::Approx(1.0));

  const auto g = render::sh_basis_gradient(n);
  for (int k = 0; k < 9; ++k)
    for (int d = 0; d < 3; ++d) {
      Vec3 a = n, b = n;
      a(d) += 1e-6;
      b(d) -= 1e-6;
      CHECK(g[k](d) == doctest::Approx((render::sh_basis(a)[k] - render::sh_basis(b)[k]) / 2e-6).epsilon(1e-6));
    }
}

TEST_CASE("projection and pose") {
  const Mat3 r = render::euler_rotation(0.2, -0.3, 0.4);
  CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
  CHECK(r.determinant() == doctest::Approx(1.0));
  const Mat3 expected = (Eigen::AngleAxisd(0.2, Vec3::UnitX()) * Eigen::AngleAxisd(-0.3, Vec3::UnitY()) *
                         Eigen::AngleAxisd(0.4, Vec3::UnitZ()))
                            .toRotationMatrix();
  CHECK((r - expected).norm() < 1e-12);

  auto params = frontal_params(32);
  VertexMatrix p(2, 3);
  p << 0, 0, 0, 55, -11, 0;
  const auto proj = render::project(p, params);
  CHECK(proj.screen(0, 0) == doctest::Approx(16.0));
  CHECK(proj.screen(1, 0) == doctest::Approx(16.0 + params.focal * 0.1));
  CHECK(proj.screen(1, 1) == doctest::Approx(16.0 - params.focal * 0.02));
  CHECK(proj.depth(1) == doctest::Approx(550.0));

  auto bad = params;
  bad.width = 4;
  CHECK_THROWS_AS(render::validate(bad), Error);
  bad = params;
  bad.near_clip = 0.0;
  CHECK_THROWS_AS(render::validate(bad), Error);
}

TEST_CASE("faces touching the near plane are culled") {
  auto params = frontal_params(16);
  VertexMatrix pos(3, 3), col = VertexMatrix::Constant(3, 3, 200.0);
  pos << -50, -50, 0, 50, -50, 0, 0, 50, -549.5;  // last vertex at depth 0.5
  FaceMatrix faces(1, 3);
  faces << 0, 1, 2;
  const auto out = render::rasterize(pos, col, all_faces(faces), params);
  CHECK(out.mask.count() == 0);
}

TEST_CASE("full face render covers the frame centre") {
  const auto model = morphable::generate_synthetic_model(7, 16);
  const auto c = morphable::sample_identity(model, 3);
  const auto syn = morphable::synthesize(model, c);
  const mesh::Mesh full{syn.positions, syn.colors, model.faces};
  auto params = frontal_params(32);
  const auto out = render::rasterize(syn.positions, syn.colors, mesh::full_topology(full), params);
  CHECK(out.mask.at(16, 16) == 1);
  CHECK(out.mask.count() > 32 * 32 / 3);
  for (std::size_t p = 0; p < out.face_id.size(); ++p)
    if (!out.mask.data[p])
      for (int ch = 0; ch < 3; ++ch) CHECK(out.image.data[3 * p + ch] == 0.0);
}

TEST_CASE("image files round trip") {
  Image img(5, 4);
  Rng rng(1);
  for (auto& v : img.data) v = std::round(rng.uniform(0, 255));
  const std::string path = (std::filesystem::temp_directory_path() / "at3d_test_img.ppm").string();
  render::save_ppm(img, path);
  CHECK(render::load_ppm(path).data == img.data);
  const std::string raw = (std::filesystem::temp_directory_path() / "at3d_test_img.raw").string();
  img.at(0, 0, 0) = 0.123456789;
  render::save_raw(img, raw);
  CHECK(render::load_raw_image(raw).data == img.data);
}
