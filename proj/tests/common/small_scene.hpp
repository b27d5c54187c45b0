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

#include <cstdint>

#include "at3d/attack/attacks.hpp"
#include "at3d/attack/pipeline.hpp"
#include "at3d/harness/experiment.hpp"
#include "at3d/harness/experiment_spec.hpp"
#include "at3d/morphable/morphable_model.hpp"
#include "at3d/render/rasterizer.hpp"

namespace at3d::testing {

// Small but complete experiment setup: resolution-16 face model, 32x32
// renders, white box A-11 and black box B-12 calibrated on 50 + 50 pairs.
inline harness::ExperimentSpec small_spec() {
  harness::ExperimentSpec spec;
  spec.morphable_seed = 7;
  spec.resolution = 16;
  spec.white_box = {recognition::Architecture::kA, 11};
  spec.black_box = {{recognition::Architecture::kB, 12}};
  spec.render.width = spec.render.height = 32;
  spec.render.illumination = harness::default_experiment_illumination();
  spec.calibration_pairs = 50;
  spec.seed = 99;
  return spec;
}

inline const harness::ExperimentContext& small_context() {
  static const harness::ExperimentContext ctx = harness::prepare_context(small_spec());
  return ctx;
}

// Everything one attacker/victim pair needs, initialized the way the
// experiment runner does it.
struct PairScene {
  morphable::Coefficients attacker;
  morphable::Coefficients victim;
  morphable::Coefficients init;
  Image x_a;
  Image x_b;
  render::RenderParams params;
  mesh::Mesh base;
  Mask patch_mask;
  attack::At3dInputs inputs;
};

inline PairScene make_pair_scene(const harness::ExperimentContext& ctx, std::uint64_t attacker,
                                 std::uint64_t victim, const attack::AttackConfig& config) {
  PairScene s;
  s.attacker = harness::identity_coefficients(ctx, attacker);
  s.victim = harness::identity_coefficients(ctx, victim);
  s.x_a = harness::render_face(ctx, s.attacker);
  s.x_b = harness::render_face(ctx, s.victim);
  s.init = attack::init_coefficients(config.init_strategy, s.attacker, s.victim, ctx.morphable,
                                     derive_seed(config.seed, 0x1417));
  s.params = attack::params_for(ctx.camera, s.init);
  s.base = morphable::synthesize_mesh(ctx.morphable, s.init);
  s.patch_mask = render::rasterize(s.base.positions, s.base.colors, ctx.patch, s.params).mask;
  s.inputs.morphable = &ctx.morphable;
  s.inputs.white_box = &ctx.models[0];
  s.inputs.patch = ctx.patch;
  s.inputs.camera = ctx.camera;
  s.inputs.attacker = {s.attacker, s.x_a};
  s.inputs.victim = {s.victim, s.x_b};
  s.inputs.target_image = s.x_b;
  return s;
}

}  // namespace at3d::testing
