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

#include "at3d/attack/adam.hpp"

#include <algorithm>
#include <cmath>

#include "at3d/core/error.hpp"

namespace at3d::attack {

void adam_step(AdamState& state, VectorX& params, const VectorX& grads, double lr,
               const AdamHyperparameters& hyper) {
  require(params.size() == grads.size() && params.size() == state.first_moment.size() &&
              params.size() == state.second_moment.size(),
          ErrorCode::kDimensionMismatch, "adam_step: parameter, gradient and state sizes differ");
  ++state.step;
  state.first_moment = hyper.beta1 * state.first_moment + (1.0 - hyper.beta1) * grads;
  state.second_moment =
      hyper.beta2 * state.second_moment + (1.0 - hyper.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = state.first_moment[i] / c1;
    const double v_hat = state.second_moment[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

VectorX project_budget(const VectorX& current, const VectorX& reference, double eta,
                       BudgetSpace space, const VectorX* coeff_std) {
  require(current.size() == reference.size(), ErrorCode::kDimensionMismatch,
          "project_budget: current and reference sizes differ");
  VectorX out(current.size());
  if (space == BudgetSpace::kCoeffNormalized) {
    require(coeff_std && coeff_std->size() == current.size(), ErrorCode::kDimensionMismatch,
            "project_budget: coeff_std required with matching size");
    for (Eigen::Index i = 0; i < current.size(); ++i) {
      const double s = (*coeff_std)[i];
      const double d = std::clamp((current[i] - reference[i]) / s, -eta, eta);
      out[i] = reference[i] + d * s;
    }
    return out;
  }
  for (Eigen::Index i = 0; i < current.size(); ++i)
    out[i] = reference[i] + std::clamp(current[i] - reference[i], -eta, eta);
  return out;
}

double budget_deviation(const VectorX& current, const VectorX& reference, BudgetSpace space,
                        const VectorX* coeff_std) {
  require(current.size() == reference.size(), ErrorCode::kDimensionMismatch,
          "budget_deviation: sizes differ");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < current.size(); ++i) {
    double d = std::abs(current[i] - reference[i]);
    if (space == BudgetSpace::kCoeffNormalized) {
      require(coeff_std && coeff_std->size() == current.size(), ErrorCode::kDimensionMismatch,
              "budget_deviation: coeff_std required with matching size");
      d /= (*coeff_std)[i];
    }
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace at3d::attack
