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

#include "at3d/attack/config.hpp"
#include "at3d/core/types.hpp"

namespace at3d::attack {

struct AdamState {
  VectorX first_moment;
  VectorX second_moment;
  long step = 0;

  explicit AdamState(Eigen::Index size = 0)
      : first_moment(VectorX::Zero(size)), second_moment(VectorX::Zero(size)) {}
};

// One bias-corrected Adam descent step, in place on `params`.
void adam_step(AdamState& state, VectorX& params, const VectorX& grads, double lr,
               const AdamHyperparameters& hyper = {});

enum class BudgetSpace { kCoeffNormalized, kVertexUnits, kColorUnits };

// reference + clamp(current - reference, -eta, eta), componentwise. In
// kCoeffNormalized the deviation is measured in units of `coeff_std`.
VectorX project_budget(const VectorX& current, const VectorX& reference, double eta,
                       BudgetSpace space, const VectorX* coeff_std = nullptr);

// Largest componentwise deviation in the space's units.
double budget_deviation(const VectorX& current, const VectorX& reference,
                        BudgetSpace space, const VectorX* coeff_std = nullptr);

}  // namespace at3d::attack
