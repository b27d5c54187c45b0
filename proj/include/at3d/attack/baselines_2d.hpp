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

#include "at3d/attack/attacks.hpp"
#include "at3d/attack/eot.hpp"

namespace at3d::attack {

// Momentum iterative method restricted to mask pixels:
//   g <- decay * g + grad / |grad|_1
//   x <- clip(x - step * sign(g) * mask) to [x^a - eps, x^a + eps] and [0, 255]
AttackResult mim_2d(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                    const Image& attacker_image, const Image& target_image,
                    const Mask& patch_mask);

// MIM whose gradient is averaged over image-space EOT transforms.
AttackResult eot_2d(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                    const Image& attacker_image, const Image& target_image,
                    const Mask& patch_mask, const EotDistribution& distribution,
                    double pixels_per_unit);

}  // namespace at3d::attack
