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

#include "at3d/attack/eot.hpp"

#include <cmath>
#include <utility>

#include "at3d/core/error.hpp"

namespace at3d::attack {

EotTransform EotDistribution::sample(Rng& rng) const {
  EotTransform t;
  for (int i = 0; i < 3; ++i) t.rotation[i] = rng.uniform(-max_rotation, max_rotation);
  for (int i = 0; i < 3; ++i) t.translation[i] = rng.uniform(-max_translation, max_translation);
  t.brightness = 1.0 + rng.uniform(-max_brightness, max_brightness);
  return t;
}

EstimatorFn eot_wrap(GradientFn inner, EotDistribution distribution, int samples) {
  require(samples >= 1, ErrorCode::kInvalidArgument, "eot_wrap: samples must be >= 1");
  require(static_cast<bool>(inner), ErrorCode::kInvalidArgument, "eot_wrap: empty gradient function");
  return [inner = std::move(inner), distribution, samples](Rng& rng) {
    VectorX sum = inner(distribution.sample(rng));
    for (int k = 1; k < samples; ++k) {
      VectorX g = inner(distribution.sample(rng));
      require(g.size() == sum.size(), ErrorCode::kDimensionMismatch,
              "eot_wrap: gradient size changed between samples");
      sum += g;
    }
    if (samples > 1) sum /= static_cast<double>(samples);
    return sum;
  };
}

namespace {

// Source coordinate (continuous pixel index) for output pixel (x, y).
struct Sampler {
  double cos_t, sin_t, cx, cy, tx, ty;

  Sampler(const EotTransform& t, int width, int height, double ppu)
      : cos_t(std::cos(t.rotation.z())), sin_t(std::sin(t.rotation.z())),
        cx(0.5 * width), cy(0.5 * height),
        tx(t.translation.x() * ppu), ty(t.translation.y() * ppu) {}

  void source(int x, int y, double& sx, double& sy) const {
    // Output = rotate(input) + shift; invert for the sample position.
    const double qx = x + 0.5 - cx - tx;
    const double qy = y + 0.5 - cy - ty;
    sx = cos_t * qx + sin_t * qy + cx - 0.5;
    sy = -sin_t * qx + cos_t * qy + cy - 0.5;
  }
};

template <class F>
void bilinear_taps(double sx, double sy, int width, int height, F&& visit) {
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0;
  const double fy = sy - y0;
  const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
  const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
  for (int k = 0; k < 4; ++k)
    if (xs[k] >= 0 && xs[k] < width && ys[k] >= 0 && ys[k] < height && w[k] != 0.0)
      visit(xs[k], ys[k], w[k]);
}

}  // namespace

Image warp_image(const Image& image, const EotTransform& t, double ppu) {
  Image out(image.width, image.height);
  const Sampler s(t, image.width, image.height, ppu);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      double sx, sy;
      s.source(x, y, sx, sy);
      bilinear_taps(sx, sy, image.width, image.height, [&](int ix, int iy, double w) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) += w * image.at(ix, iy, c);
      });
      for (int c = 0; c < 3; ++c) out.at(x, y, c) *= t.brightness;
    }
  return out;
}

Image warp_image_adjoint(const Image& grad, const EotTransform& t, double ppu) {
  Image out(grad.width, grad.height);
  const Sampler s(t, grad.width, grad.height, ppu);
  for (int y = 0; y < grad.height; ++y)
    for (int x = 0; x < grad.width; ++x) {
      double sx, sy;
      s.source(x, y, sx, sy);
      bilinear_taps(sx, sy, grad.width, grad.height, [&](int ix, int iy, double w) {
        for (int c = 0; c < 3; ++c) out.at(ix, iy, c) += t.brightness * w * grad.at(x, y, c);
      });
    }
  return out;
}

}  // namespace at3d::attack
