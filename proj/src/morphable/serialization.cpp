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

#include <fstream>

#include "at3d/core/binary_io.hpp"
#include "at3d/morphable/morphable_model.hpp"

// Morphable model container, all fields little-endian:
//   char[8]  "AT3DMM01"
//   u64      seed
//   i32      grid_resolution
//   u64      n (vertices), m (faces)
//   i32      k_id, k_exp, k_tex
//   f64[3n]  mean_shape, then mean_texture   (vertex-major x y z / r g b)
//   f64[3n*k] basis_id, basis_exp, basis_tex (row-major)
//   i32[3m]  faces
//   f64[k]   std_id, std_exp, std_tex

namespace at3d::morphable {

namespace {

constexpr char kMagic[9] = "AT3DMM01";

void put_matrix(BinaryWriter& w, const MatrixX& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  w.put_array(rm.data(), static_cast<std::size_t>(rm.size()));
}

MatrixX get_matrix(BinaryReader& r, Eigen::Index rows, Eigen::Index cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  r.get_array(rm.data(), static_cast<std::size_t>(rm.size()));
  return rm;
}

}  // namespace

void save_model(const MorphableModel& model, const std::string& path) {
  validate(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "save_model: cannot open " + path);
  BinaryWriter w(out);
  w.put_magic(kMagic);
  w.put<std::uint64_t>(model.seed);
  w.put<std::int32_t>(model.grid_resolution);
  w.put<std::uint64_t>(model.vertex_count());
  w.put<std::uint64_t>(model.face_count());
  w.put<std::int32_t>(kIdentityDim);
  w.put<std::int32_t>(kExpressionDim);
  w.put<std::int32_t>(kTextureDim);
  w.put_array(model.mean_shape.data(), static_cast<std::size_t>(model.mean_shape.size()));
  w.put_array(model.mean_texture.data(), static_cast<std::size_t>(model.mean_texture.size()));
  put_matrix(w, model.basis_id);
  put_matrix(w, model.basis_exp);
  put_matrix(w, model.basis_tex);
  w.put_array(model.faces.data(), static_cast<std::size_t>(model.faces.size()));
  w.put_array(model.std_id.data(), kIdentityDim);
  w.put_array(model.std_exp.data(), kExpressionDim);
  w.put_array(model.std_tex.data(), kTextureDim);
  out.flush();
  require(static_cast<bool>(out), ErrorCode::kIo, "save_model: write failed for " + path);
}

MorphableModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "load_model: cannot open " + path);
  BinaryReader r(in, path);
  r.expect_magic(kMagic);
  MorphableModel model;
  model.seed = r.get<std::uint64_t>();
  model.grid_resolution = r.get<std::int32_t>();
  const auto n = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const auto m = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const int k_id = r.get<std::int32_t>();
  const int k_exp = r.get<std::int32_t>();
  const int k_tex = r.get<std::int32_t>();
  require(k_id == kIdentityDim && k_exp == kExpressionDim && k_tex == kTextureDim,
          ErrorCode::kMalformedFile, path + ": unsupported basis dimensions");
  require(n > 0 && n < (1 << 24) && m >= 0 && m < (1 << 25),
          ErrorCode::kMalformedFile, path + ": implausible mesh size");
  model.mean_shape.resize(n, 3);
  model.mean_texture.resize(n, 3);
  r.get_array(model.mean_shape.data(), static_cast<std::size_t>(3 * n));
  r.get_array(model.mean_texture.data(), static_cast<std::size_t>(3 * n));
  model.basis_id = get_matrix(r, 3 * n, k_id);
  model.basis_exp = get_matrix(r, 3 * n, k_exp);
  model.basis_tex = get_matrix(r, 3 * n, k_tex);
  model.faces.resize(m, 3);
  r.get_array(model.faces.data(), static_cast<std::size_t>(3 * m));
  model.std_id.resize(k_id);
  model.std_exp.resize(k_exp);
  model.std_tex.resize(k_tex);
  r.get_array(model.std_id.data(), static_cast<std::size_t>(k_id));
  r.get_array(model.std_exp.data(), static_cast<std::size_t>(k_exp));
  r.get_array(model.std_tex.data(), static_cast<std::size_t>(k_tex));
  for (Eigen::Index f = 0; f < m; ++f)
    for (int k = 0; k < 3; ++k)
      require(model.faces(f, k) >= 0 && model.faces(f, k) < n,
              ErrorCode::kMalformedFile, path + ": face index out of range");
  return model;
}

}  // namespace at3d::morphable
