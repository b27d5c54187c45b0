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

#include "at3d/attack/baselines_2d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "at3d/core/error.hpp"

namespace at3d::attack {

namespace {

using Clock = std::chrono::steady_clock;

Eigen::Map<const VectorX> as_vector(const Image& im) {
  return Eigen::Map<const VectorX>(im.data.data(), static_cast<Eigen::Index>(im.size()));
}

using GradientAt = std::function<VectorX(const Image& x)>;

AttackResult run_mim(const char* method, const AttackConfig& config,
                     const recognition::EmbeddingModel& model, const Image& attacker,
                     const VectorX& target, const Mask& mask, const GradientAt& gradient_at) {
  const auto start = Clock::now();
  require(config.iterations >= 0, ErrorCode::kInvalidArgument,
          std::string(method) + ": iterations must be >= 0");
  require(config.epsilon >= 0.0 && config.step_size >= 0.0, ErrorCode::kInvalidArgument,
          std::string(method) + ": epsilon and step size must be >= 0");
  require(mask.width == attacker.width && mask.height == attacker.height,
          ErrorCode::kDimensionMismatch, std::string(method) + ": mask does not match the image");

  AttackResult result;
  result.method = method;
  Image x = attacker;
  VectorX momentum = VectorX::Zero(static_cast<Eigen::Index>(x.size()));
  const std::size_t pixels = static_cast<std::size_t>(x.width) * x.height;

  for (int n = 0; n < config.iterations; ++n) {
    const AttackLoss here = attack_loss(model, x, target, config.mode);
    if (!std::isfinite(here.loss))
      fail(ErrorCode::kNonFinite, std::string(method) + ": non-finite loss at iteration " +
                                      std::to_string(n) + "; config " + to_json(config).dump());
    result.loss_trace.push_back(here.loss);
    result.similarity_trace.push_back(here.similarity);

    const VectorX g = gradient_at(x);
    const double l1 = g.lpNorm<1>();
    momentum *= config.decay;
    if (l1 > 0.0) momentum += g / l1;

    double worst = 0.0;
    for (std::size_t p = 0; p < pixels; ++p) {
      if (!mask.data[p]) continue;
      for (int c = 0; c < 3; ++c) {
        const std::size_t i = 3 * p + c;
        const double m = momentum[static_cast<Eigen::Index>(i)];
        const double step = m > 0.0 ? 1.0 : (m < 0.0 ? -1.0 : 0.0);
        const double a = attacker.data[i];
        double v = x.data[i] - config.step_size * step;
        v = std::clamp(v, a - config.epsilon, a + config.epsilon);
        x.data[i] = std::clamp(v, 0.0, 255.0);
        worst = std::max(worst, std::abs(x.data[i] - a));
      }
    }
    result.budget_trace.push_back(worst);
  }

  const AttackLoss fin = attack_loss(model, x, target, config.mode);
  result.final_loss = fin.loss;
  result.final_similarity = fin.similarity;
  result.initial_loss = config.iterations == 0 ? fin.loss : result.loss_trace.front();
  result.adversarial_image = std::move(x);
  result.iterations_run = config.iterations;
  result.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace

AttackResult mim_2d(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                    const Image& attacker_image, const Image& target_image,
                    const Mask& patch_mask) {
  const VectorX target = recognition::embed(white_box, target_image).vector;
  return run_mim("2D-MIM", config, white_box, attacker_image, target, patch_mask,
                 [&](const Image& x) {
                   return VectorX(as_vector(attack_loss(white_box, x, target, config.mode).gradient));
                 });
}

AttackResult eot_2d(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                    const Image& attacker_image, const Image& target_image,
                    const Mask& patch_mask, const EotDistribution& distribution,
                    double pixels_per_unit) {
  const VectorX target = recognition::embed(white_box, target_image).vector;
  Rng rng(derive_seed(config.seed, 0xE07));
  return run_mim("2D-EOT", config, white_box, attacker_image, target, patch_mask,
                 [&](const Image& x) {
                   GradientFn inner = [&](const EotTransform& t) {
                     const Image warped = warp_image(x, t, pixels_per_unit);
                     const AttackLoss l = attack_loss(white_box, warped, target, config.mode);
                     return VectorX(as_vector(warp_image_adjoint(l.gradient, t, pixels_per_unit)));
                   };
                   return eot_wrap(inner, distribution, config.eot_samples)(rng);
                 });
}

}  // namespace at3d::attack
