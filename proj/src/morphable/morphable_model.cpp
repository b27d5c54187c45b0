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

#include "at3d/morphable/morphable_model.hpp"

#include <string>

#include "at3d/core/error.hpp"
#include "at3d/core/rng.hpp"

namespace at3d::morphable {

namespace {

void require_dim(const VectorX& v, int dim, const char* name) {
  require(v.size() == dim, ErrorCode::kDimensionMismatch,
          std::string("coefficients: ") + name + " has " +
              std::to_string(v.size()) + " entries, expected " +
              std::to_string(dim));
  require(v.allFinite(), ErrorCode::kNonFinite,
          std::string("coefficients: ") + name + " has non-finite entries");
}

}  // namespace

void validate(const Coefficients& c) {
  require_dim(c.alpha, kIdentityDim, "alpha");
  require_dim(c.beta, kExpressionDim, "beta");
  require_dim(c.tau, kTextureDim, "tau");
  require_dim(c.gamma, kIlluminationDim, "gamma");
  require_dim(c.pose, kPoseDim, "pose");
}

void validate(const MorphableModel& model) {
  const auto rows = model.mean_shape.rows() * 3;
  require(model.mean_texture.rows() == model.mean_shape.rows() &&
              model.basis_id.rows() == rows && model.basis_exp.rows() == rows &&
              model.basis_tex.rows() == rows &&
              model.basis_id.cols() == kIdentityDim &&
              model.basis_exp.cols() == kExpressionDim &&
              model.basis_tex.cols() == kTextureDim &&
              model.std_id.size() == kIdentityDim &&
              model.std_exp.size() == kExpressionDim &&
              model.std_tex.size() == kTextureDim,
          ErrorCode::kDimensionMismatch, "morphable model: inconsistent dimensions");
}

VectorX ambient_illumination() {
  VectorX g = VectorX::Zero(kIlluminationDim);
  g(0) = 1.0 / 0.28209479177387814;
  return g;
}

VectorX frontal_pose() {
  VectorX p = VectorX::Zero(kPoseDim);
  p(5) = kFrontalDistance;
  return p;
}

Synthesis synthesize(const MorphableModel& model, const Coefficients& c) {
  validate(c);
  Synthesis out;
  out.positions = model.mean_shape;
  flatten(out.positions).noalias() += model.basis_id * c.alpha;
  flatten(out.positions).noalias() += model.basis_exp * c.beta;
  VertexMatrix raw = model.mean_texture;
  flatten(raw).noalias() += model.basis_tex * c.tau;
  out.colors = raw.cwiseMax(0.0).cwiseMin(255.0);
  out.color_active = (raw.array() >= 0.0 && raw.array() <= 255.0).cast<double>();
  return out;
}

CoefficientGradients synthesize_backward(const MorphableModel& model,
                                         const VertexMatrix& dL_dpositions,
                                         const VertexMatrix& dL_dcolors,
                                         const VertexMatrix& color_active) {
  const auto n = model.mean_shape.rows();
  require(dL_dpositions.rows() == n && dL_dcolors.rows() == n &&
              color_active.rows() == n,
          ErrorCode::kDimensionMismatch,
          "synthesize_backward: gradient rows do not match the model's " +
              std::to_string(n) + " vertices");
  CoefficientGradients g;
  const auto dp = flatten(dL_dpositions);
  g.alpha.noalias() = model.basis_id.transpose() * dp;
  g.beta.noalias() = model.basis_exp.transpose() * dp;
  const VertexMatrix gated = dL_dcolors.cwiseProduct(color_active);
  g.tau.noalias() = model.basis_tex.transpose() * flatten(gated);
  return g;
}

Coefficients sample_identity(const MorphableModel& model, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1d));
  Coefficients c;
  for (int k = 0; k < kIdentityDim; ++k) c.alpha(k) = rng.normal() * model.std_id(k);
  for (int k = 0; k < kExpressionDim; ++k) c.beta(k) = rng.normal() * model.std_exp(k);
  for (int k = 0; k < kTextureDim; ++k) c.tau(k) = rng.normal() * model.std_tex(k);
  c.gamma = ambient_illumination();
  c.pose = frontal_pose();
  return c;
}

mesh::Mesh synthesize_mesh(const MorphableModel& model, const Coefficients& c) {
  auto s = synthesize(model, c);
  mesh::Mesh m;
  m.positions = std::move(s.positions);
  m.colors = std::move(s.colors);
  m.faces = model.faces;
  return m;
}

}  // namespace at3d::morphable
