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
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "at3d/mesh/patch.hpp"

namespace at3d::attack {

enum class AttackMode { kDodge, kImpersonate };
enum class InitStrategy { kNoise, kAttacker, kVictim, kAVictim };

const char* mode_name(AttackMode mode);
AttackMode parse_mode(const std::string& name);  // "Dodge" / "Impersonate"
const char* strategy_name(InitStrategy s);
InitStrategy parse_strategy(const std::string& name);  // "Noise", "Attacker", "Victim", "AVictim"

struct InitStrategies {
  InitStrategy shape = InitStrategy::kAVictim;    // alpha, beta
  InitStrategy texture = InitStrategy::kAVictim;  // tau
};

struct AdamHyperparameters {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AttackConfig {
  AttackMode mode = AttackMode::kImpersonate;
  int iterations = 300;
  double budget = 3.0;
  std::optional<double> learning_rate;  // unset: 1.5 * budget / iterations
  InitStrategies init_strategy;
  mesh::Region patch_region = mesh::Region::kEyeNose;
  AdamHyperparameters adam;
  std::uint64_t seed = 0;

  // Mesh-space regularizer weights (AT3D-ML).
  double lambda_chamfer = 0.0;
  double lambda_laplacian = 0.0;
  double lambda_edge = 0.0;

  // 2D baselines (MIM / EOT): step in [0, 255] units, momentum decay,
  // L-infinity radius, EOT sample count.
  double step_size = 1.5;
  double decay = 1.0;
  double epsilon = 40.0;
  int eot_samples = 4;

  double effective_learning_rate() const;
};

// Checks the config invariants (iterations >= 1, budget > 0, learning rate
// > 0, ...); throws kValidation with the offending field name.
void validate(const AttackConfig& config);

nlohmann::json to_json(const AttackConfig& config);
// Missing fields take their defaults; unknown fields and bad values throw
// kValidation with a path prefixed by `where`.
AttackConfig config_from_json(const nlohmann::json& j, const std::string& where = "config");

}  // namespace at3d::attack
