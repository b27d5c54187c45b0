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
#include <optional>
#include <string>
#include <vector>

#include "at3d/attack/adam.hpp"
#include "at3d/attack/config.hpp"
#include "at3d/attack/pipeline.hpp"
#include "at3d/mesh/mesh.hpp"

namespace at3d::attack {

struct Identity {
  morphable::Coefficients coefficients;
  Image image;  // rendered reference image of this identity
};

struct AttackResult {
  std::string method;
  mesh::Mesh final_mesh;     // full vertex arrays, faces = F' (empty for 2D)
  mesh::Mesh initial_mesh;   // starting point, same layout
  Image adversarial_image;   // x*
  std::vector<double> loss_trace;        // loss at the start of each iteration
  std::vector<double> similarity_trace;  // white-box similarity, same points
  std::vector<double> budget_trace;      // max deviation after each iteration
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_similarity = 0.0;
  std::optional<morphable::Coefficients> final_coefficients;
  int iterations_run = 0;
  double wall_time_seconds = 0.0;
};

// Algorithm-1 initialization. Shape strategy sets alpha and beta, texture
// strategy sets tau:
//   AVictim, Victim -> victim's block; Attacker -> attacker's block;
//   Noise -> Gaussian draw with the model's per-column deviations.
// Illumination and pose are the victim's only when both strategies are
// Victim; otherwise the attacker's.
morphable::Coefficients init_coefficients(const InitStrategies& strategy,
                                          const morphable::Coefficients& attacker,
                                          const morphable::Coefficients& victim,
                                          const morphable::MorphableModel& model,
                                          std::uint64_t seed);

enum class CoefficientBlock { kAlpha, kBeta, kTau };

struct SubUpdateEvent {
  int iteration;
  CoefficientBlock block;
  const morphable::Coefficients& before;  // coefficients fed to the forward pass
  const morphable::Coefficients& after;   // after the Adam step and projection
  double loss;
};
using SubUpdateObserver = std::function<void(const SubUpdateEvent&)>;

struct At3dInputs {
  const morphable::MorphableModel* morphable = nullptr;
  const recognition::EmbeddingModel* white_box = nullptr;
  mesh::PatchTopology patch;
  render::RenderParams camera;  // intrinsics; pose/illumination come from coefficients
  Identity attacker;
  Identity victim;              // target of impersonation
  Image target_image;           // x^b (victim image, or attacker reference for dodging)
};

// Coefficient-space attack: N iterations of sequential alpha, beta, tau
// sub-updates, each a full forward/backward, one Adam step on its block (in
// coeff_std-normalized coordinates) and an L-infinity projection onto the
// budget around the initialization. Illumination and pose stay fixed.
AttackResult at3d_p(const AttackConfig& config, const At3dInputs& inputs,
                    const SubUpdateObserver& observer = nullptr);

// Mesh-space attack: positions (model units) and colours ([0, 255] units) of
// the patch vertices optimized directly with Adam, projected onto the budget
// around `base_mesh`. Non-zero lambdas in `config` add the chamfer, Laplacian
// and edge-length regularizers (AT3D-ML).
AttackResult at3d_m(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                    const mesh::Mesh& base_mesh, const mesh::PatchTopology& patch,
                    const render::RenderParams& params, const Image& attacker_image,
                    const Image& target_image);

AttackResult at3d_ml(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                     const mesh::Mesh& base_mesh, const mesh::PatchTopology& patch,
                     const render::RenderParams& params, const Image& attacker_image,
                     const Image& target_image, double lambda_chamfer,
                     double lambda_laplacian, double lambda_edge);

// Weighted regularizer objective over the patch sub-mesh and its gradient
// with respect to the full position array.
double mesh_regularizer(const mesh::Mesh& current, const mesh::Mesh& original,
                        const mesh::PatchTopology& patch, double lambda_chamfer,
                        double lambda_laplacian, double lambda_edge,
                        VertexMatrix* grad);

}  // namespace at3d::attack
