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

#include "at3d/attack/evaluation.hpp"

#include "at3d/core/error.hpp"
#include "at3d/recognition/verification.hpp"

namespace at3d::attack {

double SuccessTable::at(const std::string& method, const std::string& model) const {
  for (std::size_t i = 0; i < methods.size(); ++i)
    if (methods[i] == method)
      for (std::size_t j = 0; j < models.size(); ++j)
        if (models[j] == model) return percent[i][j];
  fail(ErrorCode::kInvalidArgument, "success table has no cell (" + method + ", " + model + ")");
}

bool counts_for(const EvaluatedModel& m, const PairOutcome& pair, AttackMode mode) {
  if (mode == AttackMode::kImpersonate) return true;
  return recognition::verify(*m.model, pair.original, pair.target, m.delta) == 1;
}

bool attack_succeeded(const EvaluatedModel& m, const PairOutcome& pair, AttackMode mode) {
  require(m.model != nullptr, ErrorCode::kInvalidArgument, "eval_attack: missing model");
  const int match = recognition::verify(*m.model, pair.adversarial, pair.target, m.delta);
  if (mode == AttackMode::kImpersonate) return match == 1;
  return counts_for(m, pair, mode) && match == 0;
}

SuccessTable eval_attack(const std::vector<MethodOutcomes>& results,
                         const std::vector<EvaluatedModel>& models, AttackMode mode) {
  SuccessTable t;
  for (const auto& m : models) t.models.push_back(m.name);
  for (const auto& r : results) {
    t.methods.push_back(r.method);
    std::vector<double> row;
    std::vector<int> counted;
    for (const auto& m : models) {
      int hits = 0, total = 0;
      for (const auto& pair : r.pairs) {
        if (!counts_for(m, pair, mode)) continue;
        ++total;
        if (attack_succeeded(m, pair, mode)) ++hits;
      }
      row.push_back(total > 0 ? 100.0 * hits / total : 0.0);
      counted.push_back(total);
    }
    t.percent.push_back(std::move(row));
    t.counted.push_back(std::move(counted));
  }
  return t;
}

}  // namespace at3d::attack
