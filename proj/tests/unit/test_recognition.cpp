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

#include <filesystem>

#include "at3d/core/error.hpp"
#include "at3d/recognition/embedding.hpp"
#include "at3d/recognition/verification.hpp"
#include "../common/test_support.hpp"

using namespace at3d;
using namespace at3d::testing;
using recognition::Architecture;

namespace {

Image random_image(int w, int h, Rng& rng) {
  Image img(w, h);
  for (auto& v : img.data) v = rng.uniform(0, 255);
  return img;
}

// Straightforward reimplementation: explicit padded convolution over CHW.
VectorX reference_embedding(const recognition::EmbeddingModel& m, const Image& img) {
  int h = img.height, w = img.width, c = 3;
  std::vector<double> act(static_cast<std::size_t>(c) * h * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < 3; ++ch) act[(static_cast<std::size_t>(ch) * h + y) * w + x] = img.at(x, y, ch) / 255.0;
  std::size_t off = 0;
  for (const auto& L : m.layers) {
    const int pad = L.kernel / 2;
    const int oh = (h + 2 * pad - L.kernel) / L.stride + 1;
    const int ow = (w + 2 * pad - L.kernel) / L.stride + 1;
    std::vector<double> next(static_cast<std::size_t>(L.out_channels) * oh * ow);
    const double* W = m.weights.data() + off;
    const double* B = W + static_cast<std::size_t>(L.out_channels) * L.in_channels * L.kernel * L.kernel;
    for (int o = 0; o < L.out_channels; ++o)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          double s = B[o];
          for (int i = 0; i < L.in_channels; ++i)
            for (int ky = 0; ky < L.kernel; ++ky)
              for (int kx = 0; kx < L.kernel; ++kx) {
                const int iy = oy * L.stride + ky - pad, ix = ox * L.stride + kx - pad;
                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                s += W[((o * L.in_channels + i) * L.kernel + ky) * L.kernel + kx] *
                     act[(static_cast<std::size_t>(i) * h + iy) * w + ix];
              }
          next[(static_cast<std::size_t>(o) * oh + oy) * ow + ox] = std::tanh(s);
        }
    off += static_cast<std::size_t>(L.out_channels) * L.in_channels * L.kernel * L.kernel + L.out_channels;
    act = std::move(next);
    h = oh;
    w = ow;
    c = L.out_channels;
  }
  VectorX pooled = VectorX::Zero(c);
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < h * w; ++i) pooled(ch) += act[static_cast<std::size_t>(ch) * h * w + i] / (h * w);
  VectorX z(m.embedding_dim);
  for (int e = 0; e < m.embedding_dim; ++e) {
    z(e) = m.weights[off + static_cast<std::size_t>(m.embedding_dim) * c + e];
    for (int ch = 0; ch < c; ++ch) z(e) += m.weights[off + static_cast<std::size_t>(e) * c + ch] * pooled(ch);
  }
  return z / z.norm();
}

}  // namespace

TEST_CASE("architectures and weight counts") {
  const auto a = recognition::build_toy_model(Architecture::kA, 11, 32, 32);
  const auto b = recognition::build_toy_model(Architecture::kB, 12, 32, 32);
  CHECK(a.layers.size() == 3);
  CHECK(b.layers.size() == 4);
  // A: 3*8*9+8, 8*16*9+16, 16*32*9+32, linear 128*32+128.
  CHECK(a.weights.size() == 224u + 1168u + 4640u + 4224u);
  CHECK(a.weights.size() == a.expected_weight_count());
  CHECK(b.weights.size() == b.expected_weight_count());
  CHECK(recognition::parse_architecture("B") == Architecture::kB);
  CHECK_THROWS_AS(recognition::parse_architecture("C"), Error);
}

TEST_CASE("embedding matches a direct reimplementation") {
  Rng rng(77);
  for (auto arch : {Architecture::kA, Architecture::kB})
    for (int size : {32, 40}) {
      const auto m = recognition::build_toy_model(arch, 3, size, size);
      const Image img = random_image(size, size, rng);
      const auto e = recognition::embed(m, img);
      CHECK(e.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((e.vector - reference_embedding(m, img)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("embedding dimension and cache checks") {
  const auto a = recognition::build_toy_model(Architecture::kA, 1, 32, 32);
  const auto b = recognition::build_toy_model(Architecture::kB, 1, 32, 32);
  Rng rng(2);
  CHECK_THROWS_AS(recognition::embed(a, Image(16, 16)), Error);
  const auto e = recognition::embed(a, random_image(32, 32, rng));
  try {
    recognition::embed_backward(b, e.cache, VectorX::Ones(128));
    FAIL("expected a cache mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kCacheMismatch);
  }
}

TEST_CASE("embedding gradient is linear in the upstream vector and matches differences") {
  const auto m = recognition::build_toy_model(Architecture::kB, 5, 32, 32);
  Rng rng(6);
  const Image img = random_image(32, 32, rng);
  const auto e = recognition::embed(m, img);
  const VectorX u = random_vector(128, rng), v = random_vector(128, rng);
  const Image gu = recognition::embed_backward(m, e.cache, u);
  const Image gv = recognition::embed_backward(m, e.cache, v);
  const Image guv = recognition::embed_backward(m, e.cache, 2.0 * u - v);
  double worst = 0.0;
  for (std::size_t i = 0; i < gu.size(); ++i)
    worst = std::max(worst, std::abs(guv.data[i] - (2.0 * gu.data[i] - gv.data[i])));
  CHECK(worst < 1e-12);

  // Directional derivative along a random image direction.
  Image dir(32, 32);
  for (auto& x : dir.data) x = rng.uniform(-1, 1);
  auto f = [&](double t) {
    Image p = img;
    for (std::size_t i = 0; i < p.size(); ++i) p.data[i] += t * dir.data[i];
    return u.dot(recognition::embed(m, p).vector);
  };
  double analytic = 0.0;
  for (std::size_t i = 0; i < gu.size(); ++i) analytic += gu.data[i] * dir.data[i];
  const double numeric = (f(0.05) - f(-0.05)) / 0.1;
  CHECK(analytic == doctest::Approx(numeric).epsilon(1e-5));
}

TEST_CASE("architectures A and B give different embeddings") {
  const auto a = recognition::build_toy_model(Architecture::kA, 9, 32, 32);
  const auto b = recognition::build_toy_model(Architecture::kB, 9, 32, 32);
  const auto a2 = recognition::build_toy_model(Architecture::kA, 10, 32, 32);
  Rng rng(3);
  const Image img = random_image(32, 32, rng);
  const VectorX ea = recognition::embed(a, img).vector;
  CHECK(std::abs(ea.dot(recognition::embed(b, img).vector)) < 0.99);
  CHECK(std::abs(ea.dot(recognition::embed(a2, img).vector)) < 0.99);
  CHECK(ea == recognition::embed(recognition::build_toy_model(Architecture::kA, 9, 32, 32), img).vector);
}

TEST_CASE("cosine similarity and verification") {
  VectorX a(2), b(2);
  a << 1, 0;
  b << 1, 1;
  CHECK(recognition::cosine_similarity(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(recognition::cosine_similarity(a, -a) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(recognition::cosine_similarity(a, VectorX::Zero(2)), Error);
  CHECK(recognition::verify_embeddings(a, b, 0.7) == 1);
  CHECK(recognition::verify_embeddings(a, b, 1.0 / std::sqrt(2.0)) == 0);
}

TEST_CASE("threshold calibration") {
  std::vector<double> same, diff;
  for (int i = 0; i < 50; ++i) {
    same.push_back(0.8 + 0.001 * i);
    diff.push_back(0.2 + 0.001 * i);
  }
  auto t = recognition::calibrate_from_scores(same, diff);
  CHECK(t.report.accuracy == 1.0);
  CHECK(t.delta > 0.249);
  CHECK(t.delta < 0.8);
  // Smallest separating midpoint.
  CHECK(t.delta == doctest::Approx((0.249 + 0.8) / 2));
  CHECK(t.report.same_pairs == 50);

  // Overlap: one diff score above every same score.
  diff[0] = 0.95;
  t = recognition::calibrate_from_scores(same, diff);
  CHECK(t.report.accuracy == doctest::Approx(0.99));
  CHECK(t.report.false_accept_rate == doctest::Approx(0.02));
  CHECK(t.report.false_reject_rate == 0.0);

  same.pop_back();
  try {
    recognition::calibrate_from_scores(same, diff);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
}

TEST_CASE("embedding model file round trip") {
  const auto m = recognition::build_toy_model(Architecture::kB, 4, 48, 40);
  const std::string path = (std::filesystem::temp_directory_path() / "at3d_test_net.bin").string();
  recognition::save_embedding_model(m, path);
  const auto back = recognition::load_embedding_model(path);
  CHECK(back.weights == m.weights);
  CHECK(back.input_width == 48);
  CHECK(back.input_height == 40);
  CHECK(back.architecture == Architecture::kB);
  CHECK(back.layers.size() == m.layers.size());
}
