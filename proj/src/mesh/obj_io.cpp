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

#include "at3d/mesh/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "at3d/core/error.hpp"

namespace at3d::mesh {

namespace {

[[noreturn]] void malformed(const std::string& path, int line,
                            const std::string& what) {
  fail(ErrorCode::kMalformedFile,
       path + ":" + std::to_string(line) + ": " + what);
}

// Position index of one `f` token (`i`, `i/t`, `i//n`, `i/t/n`).
int parse_face_index(const std::string& token, int vertex_count,
                     const std::string& path, int line) {
  const std::string head = token.substr(0, token.find('/'));
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(head, &used);
  } catch (const std::exception&) {
    malformed(path, line, "bad face index '" + token + "'");
  }
  if (used != head.size()) malformed(path, line, "bad face index '" + token + "'");
  if (value == 0) malformed(path, line, "face index 0 (OBJ indices are 1-based)");
  if (value < 0) value += vertex_count + 1;  // relative index
  if (value < 1 || value > vertex_count)
    malformed(path, line, "face index " + head + " out of range");
  return static_cast<int>(value - 1);
}

}  // namespace

void save_obj(const Mesh& mesh, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, ErrorCode::kIo, "save_obj: cannot open " + path);
  std::fprintf(f, "# at3d mesh: %zu vertices, %zu faces\n", mesh.vertex_count(),
               mesh.face_count());
  const bool has_colors = mesh.colors.rows() == mesh.positions.rows();
  for (Eigen::Index i = 0; i < mesh.positions.rows(); ++i) {
    std::fprintf(f, "v %.10g %.10g %.10g", mesh.positions(i, 0),
                 mesh.positions(i, 1), mesh.positions(i, 2));
    if (has_colors) {
      std::fprintf(f, " %.10g %.10g %.10g", mesh.colors(i, 0) / 255.0,
                   mesh.colors(i, 1) / 255.0, mesh.colors(i, 2) / 255.0);
    }
    std::fputc('\n', f);
  }
  for (Eigen::Index t = 0; t < mesh.faces.rows(); ++t) {
    std::fprintf(f, "f %d %d %d\n", mesh.faces(t, 0) + 1, mesh.faces(t, 1) + 1,
                 mesh.faces(t, 2) + 1);
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  require(ok, ErrorCode::kIo, "save_obj: write failed for " + path);
}

Mesh load_obj(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "load_obj: cannot open " + path);

  std::vector<double> pos;
  std::vector<double> col;
  std::vector<int> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::vector<double> values;
      std::string tok;
      while (ss >> tok) {
        try {
          std::size_t used = 0;
          values.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          malformed(path, line_no, "bad number '" + tok + "'");
        }
      }
      if (values.size() != 3 && values.size() != 6)
        malformed(path, line_no, "vertex line needs 3 or 6 numbers");
      pos.insert(pos.end(), values.begin(), values.begin() + 3);
      for (int c = 0; c < 3; ++c)
        col.push_back(values.size() == 6 ? values[3 + c] * 255.0 : 0.0);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (tokens.size() != 3)
        malformed(path, line_no, "face with " + std::to_string(tokens.size()) +
                                     " vertices (only triangles are supported)");
      const int n = static_cast<int>(pos.size() / 3);
      int idx[3];
      for (int k = 0; k < 3; ++k) idx[k] = parse_face_index(tokens[k], n, path, line_no);
      if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2])
        malformed(path, line_no, "degenerate face repeats a vertex");
      faces.insert(faces.end(), idx, idx + 3);
    }
    // Other statements (vt, vn, o, g, s, usemtl, ...) are ignored.
  }

  Mesh m;
  const auto n = static_cast<Eigen::Index>(pos.size() / 3);
  m.positions = Eigen::Map<const VertexMatrix>(pos.data(), n, 3);
  m.colors = Eigen::Map<const VertexMatrix>(col.data(), n, 3);
  m.colors = m.colors.cwiseMax(0.0).cwiseMin(255.0);
  m.faces = Eigen::Map<const FaceMatrix>(faces.data(),
                                         static_cast<Eigen::Index>(faces.size() / 3), 3);
  return m;
}

}  // namespace at3d::mesh
