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

#include <string>
#include <vector>

#include "at3d/attack/config.hpp"
#include "at3d/core/image.hpp"
#include "at3d/recognition/embedding.hpp"

namespace at3d::attack {

struct EvaluatedModel {
  std::string name;
  const recognition::EmbeddingModel* model = nullptr;
  double delta = 0.0;
};

// One attacked pair: adversarial image, the comparison image x^b, and for
// dodging the unmodified attacker image (only originally matching pairs count).
struct PairOutcome {
  Image adversarial;
  Image target;
  Image original;
};

struct MethodOutcomes {
  std::string method;
  std::vector<PairOutcome> pairs;
};

struct SuccessTable {
  std::vector<std::string> methods;
  std::vector<std::string> models;
  std::vector<std::vector<double>> percent;  // [method][model]
  std::vector<std::vector<int>> counted;     // pairs in the denominator

  double at(const std::string& method, const std::string& model) const;
};

// Impersonation: verify(x*, x^b) == 1. Dodging: verify(x*, x^b) == 0 for a
// pair with verify(x^a, x^b) == 1; returns false for non-matching pairs.
bool attack_succeeded(const EvaluatedModel& model, const PairOutcome& pair,
                      AttackMode mode);
bool counts_for(const EvaluatedModel& model, const PairOutcome& pair, AttackMode mode);

SuccessTable eval_attack(const std::vector<MethodOutcomes>& results,
                         const std::vector<EvaluatedModel>& models, AttackMode mode);

}  // namespace at3d::attack
