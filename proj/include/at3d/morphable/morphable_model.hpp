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
#include <string>

#include "at3d/core/types.hpp"
#include "at3d/mesh/mesh.hpp"

namespace at3d::morphable {

inline constexpr int kIdentityDim = 80;
inline constexpr int kExpressionDim = 64;
inline constexpr int kTextureDim = 80;
inline constexpr int kIlluminationDim = 9;
inline constexpr int kPoseDim = 6;

// Distance from the camera to the canonical face origin in the frontal pose.
inline constexpr double kFrontalDistance = 550.0;

// Linear face model: S = mean_shape + B_id a + B_exp b, T = mean_texture + B_tex t.
// Bases are (3n) x k with rows ordered like the flattened n x 3 vertex arrays.
struct MorphableModel {
  VertexMatrix mean_shape;
  VertexMatrix mean_texture;
  MatrixX basis_id;
  MatrixX basis_exp;
  MatrixX basis_tex;
  FaceMatrix faces;
  VectorX std_id;
  VectorX std_exp;
  VectorX std_tex;
  std::uint64_t seed = 0;
  int grid_resolution = 0;

  std::size_t vertex_count() const { return static_cast<std::size_t>(mean_shape.rows()); }
  std::size_t face_count() const { return static_cast<std::size_t>(faces.rows()); }
};

// alpha (identity), beta (expression), tau (texture), gamma (SH illumination,
// shared across channels) and pose (Euler X, Y, Z in radians, then translation).
struct Coefficients {
  VectorX alpha = VectorX::Zero(kIdentityDim);
  VectorX beta = VectorX::Zero(kExpressionDim);
  VectorX tau = VectorX::Zero(kTextureDim);
  VectorX gamma = VectorX::Zero(kIlluminationDim);
  VectorX pose = VectorX::Zero(kPoseDim);

  bool operator==(const Coefficients&) const = default;
};

// Throws kDimensionMismatch on wrong block sizes and kNonFinite on NaN/inf.
void validate(const Coefficients& c);
void validate(const MorphableModel& model);

// SH vector producing unit shading for every normal.
VectorX ambient_illumination();
// Euler angles zero, face centred on the optical axis at kFrontalDistance.
VectorX frontal_pose();

struct Synthesis {
  VertexMatrix positions;
  VertexMatrix colors;        // clamped to [0, 255]
  VertexMatrix color_active;  // 1 where the clamp was inactive, else 0
};

Synthesis synthesize(const MorphableModel& model, const Coefficients& c);

struct CoefficientGradients {
  VectorX alpha;
  VectorX beta;
  VectorX tau;
};

// Adjoint of synthesize. `color_active` gates the texture gradient (the clamp
// sub-gradient is zero where clamping was active); pass the forward pass's mask.
CoefficientGradients synthesize_backward(const MorphableModel& model,
                                         const VertexMatrix& dL_dpositions,
                                         const VertexMatrix& dL_dcolors,
                                         const VertexMatrix& color_active);

// Deterministic desk-scale model on a grid_resolution^2 height-field grid.
// Throws kInvalidArgument when grid_resolution < 8.
MorphableModel generate_synthetic_model(std::uint64_t seed, int grid_resolution);

// Zero-mean Gaussian coefficients with the model's per-column deviations,
// ambient illumination and frontal pose.
Coefficients sample_identity(const MorphableModel& model, std::uint64_t seed);

// Mesh (positions, colors, all model faces) for a coefficient set.
mesh::Mesh synthesize_mesh(const MorphableModel& model, const Coefficients& c);

// Little-endian binary container; see serialization.cpp for the layout.
void save_model(const MorphableModel& model, const std::string& path);
MorphableModel load_model(const std::string& path);

}  // namespace at3d::morphable
