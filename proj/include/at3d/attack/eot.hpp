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

#include "at3d/core/image.hpp"
#include "at3d/core/rng.hpp"
#include "at3d/core/types.hpp"

namespace at3d::attack {

// One draw of viewing conditions: Euler perturbation (radians), translation
// (model units) and a brightness multiplier.
struct EotTransform {
  Vec3 rotation = Vec3::Zero();
  Vec3 translation = Vec3::Zero();
  double brightness = 1.0;

  bool is_identity() const {
    return rotation.isZero(0.0) && translation.isZero(0.0) && brightness == 1.0;
  }
};

// Independent uniform draws in [-max, max] per component.
struct EotDistribution {
  double max_rotation = 0.1;
  double max_translation = 0.02 * 160.0;  // 2% of the face width
  double max_brightness = 0.1;

  static EotDistribution zero_width() { return {0.0, 0.0, 0.0}; }
  EotTransform sample(Rng& rng) const;
};

using GradientFn = std::function<VectorX(const EotTransform&)>;
using EstimatorFn = std::function<VectorX(Rng&)>;

// Averages `inner` over `samples` i.i.d. transforms drawn from the caller's
// generator. With one sample from a zero-width distribution it returns
// inner(identity) exactly.
EstimatorFn eot_wrap(GradientFn inner, EotDistribution distribution, int samples);

// Image-space realization of a transform for 2D attacks: in-plane rotation
// (the Z Euler component) about the image centre, translation converted to
// pixels with `pixels_per_unit`, then brightness scaling; bilinear sampling
// with a black border. X/Y Euler components have no 2D counterpart.
Image warp_image(const Image& image, const EotTransform& t, double pixels_per_unit);
// Adjoint of warp_image (maps an output-space gradient to input space).
Image warp_image_adjoint(const Image& grad, const EotTransform& t, double pixels_per_unit);

}  // namespace at3d::attack
