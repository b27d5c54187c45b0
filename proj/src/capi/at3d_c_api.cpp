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

#include "at3d/at3d.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "at3d/core/error.hpp"
#include "at3d/harness/curvature_table.hpp"
#include "at3d/harness/experiment.hpp"
#include "at3d/harness/gradcheck.hpp"
#include "at3d/mesh/curvature.hpp"
#include "at3d/mesh/obj_io.hpp"
#include "at3d/morphable/morphable_model.hpp"
#include "at3d/recognition/embedding.hpp"
#include "at3d/render/image_io.hpp"
#include "at3d/render/rasterizer.hpp"

struct at3d_mesh {
  at3d::mesh::Mesh mesh;
};
struct at3d_morphable {
  at3d::morphable::MorphableModel model;
};
struct at3d_embedding {
  at3d::recognition::EmbeddingModel model;
};

namespace {

thread_local std::string g_last_error;

at3d_status set_error(at3d_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <class F>
at3d_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return AT3D_OK;
  } catch (const at3d::Error& e) {
    return set_error(static_cast<at3d_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(AT3D_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(AT3D_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(AT3D_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (!p) at3d::fail(at3d::ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* at3d_version(void) { return "0.1.0"; }

const char* at3d_last_error(void) { return g_last_error.c_str(); }

const char* at3d_status_name(at3d_status status) {
  switch (status) {
    case AT3D_OK: return "ok";
    case AT3D_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AT3D_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case AT3D_ERR_EMPTY_PATCH: return "empty patch";
    case AT3D_ERR_ISOLATED_VERTEX: return "isolated vertex";
    case AT3D_ERR_IO: return "i/o error";
    case AT3D_ERR_MALFORMED_FILE: return "malformed file";
    case AT3D_ERR_NON_FINITE: return "non-finite value";
    case AT3D_ERR_VALIDATION: return "validation error";
    case AT3D_ERR_TOPOLOGY_MISMATCH: return "topology mismatch";
    case AT3D_ERR_CACHE_MISMATCH: return "cache mismatch";
    case AT3D_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case AT3D_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void at3d_string_free(char* s) { std::free(s); }

at3d_status at3d_mesh_load_obj(const char* path, at3d_mesh** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto m = std::make_unique<at3d_mesh>();
    m->mesh = at3d::mesh::load_obj(path);
    *out = m.release();
  });
}

at3d_status at3d_mesh_save_obj(const at3d_mesh* mesh, const char* path) {
  return guard([&] {
    need(mesh, "mesh");
    need(path, "path");
    at3d::mesh::save_obj(mesh->mesh, path);
  });
}

at3d_status at3d_mesh_counts(const at3d_mesh* mesh, size_t* vertices, size_t* faces) {
  return guard([&] {
    need(mesh, "mesh");
    if (vertices) *vertices = mesh->mesh.vertex_count();
    if (faces) *faces = mesh->mesh.face_count();
  });
}

at3d_status at3d_mesh_average_curvature(const at3d_mesh* mesh, double radius, int interior_only,
                                        double* out) {
  return guard([&] {
    need(mesh, "mesh");
    need(out, "out");
    *out = at3d::mesh::average_curvature(mesh->mesh, radius, interior_only != 0);
  });
}

at3d_status at3d_mesh_curvature_report_json(const at3d_mesh* mesh, double radius,
                                            int interior_only, char** out_json) {
  return guard([&] {
    need(mesh, "mesh");
    need(out_json, "out_json");
    *out_json = copy_string(
        at3d::mesh::curvature_report(mesh->mesh, radius, interior_only != 0).to_json());
  });
}

void at3d_mesh_free(at3d_mesh* mesh) { delete mesh; }

at3d_status at3d_curvature_csv(const char* const* paths, size_t path_count, const double* radii,
                               size_t radius_count, char** out_csv) {
  return guard([&] {
    need(out_csv, "out_csv");
    if (path_count) need(paths, "paths");
    if (radius_count) need(radii, "radii");
    std::vector<std::string> p;
    for (size_t i = 0; i < path_count; ++i) {
      need(paths[i], "paths[i]");
      p.emplace_back(paths[i]);
    }
    const std::vector<double> r(radii, radii + radius_count);
    *out_csv = copy_string(at3d::harness::curvature_csv(at3d::harness::curvature_table(p, r)));
  });
}

at3d_status at3d_morphable_generate(uint64_t seed, int resolution, at3d_morphable** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    auto m = std::make_unique<at3d_morphable>();
    m->model = at3d::morphable::generate_synthetic_model(seed, resolution);
    *out = m.release();
  });
}

at3d_status at3d_morphable_load(const char* path, at3d_morphable** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto m = std::make_unique<at3d_morphable>();
    m->model = at3d::morphable::load_model(path);
    *out = m.release();
  });
}

at3d_status at3d_morphable_save(const at3d_morphable* model, const char* path) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    at3d::morphable::save_model(model->model, path);
  });
}

at3d_status at3d_morphable_get_info(const at3d_morphable* model, at3d_morphable_info* out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    const auto& m = model->model;
    out->vertices = m.vertex_count();
    out->faces = m.face_count();
    out->identity_dim = static_cast<int>(m.basis_id.cols());
    out->expression_dim = static_cast<int>(m.basis_exp.cols());
    out->texture_dim = static_cast<int>(m.basis_tex.cols());
    out->resolution = m.grid_resolution;
    out->seed = m.seed;
  });
}

void at3d_morphable_free(at3d_morphable* model) { delete model; }

void at3d_render_params_default(at3d_render_params* params) {
  if (!params) return;
  const at3d::render::RenderParams d;
  params->width = d.width;
  params->height = d.height;
  params->focal = 0.0;
  params->near_clip = d.near_clip;
  for (int i = 0; i < 6; ++i) params->pose[i] = d.pose[i];
  for (int i = 0; i < 9; ++i) params->illumination[i] = d.illumination[i];
}

at3d_status at3d_render_identity(const at3d_morphable* model, uint64_t coeff_seed,
                                 const at3d_render_params* params, const char* out_prefix,
                                 size_t* mask_pixels) {
  return guard([&] {
    need(model, "model");
    need(params, "params");
    need(out_prefix, "out_prefix");
    at3d::render::RenderParams p;
    p.width = params->width;
    p.height = params->height;
    p.focal = params->focal > 0.0 ? params->focal
                                  : at3d::render::RenderParams::framing_focal(params->height);
    p.near_clip = params->near_clip;
    p.pose = Eigen::Map<const at3d::VectorX>(params->pose, 6);
    p.illumination = Eigen::Map<const at3d::VectorX>(params->illumination, 9);
    at3d::render::validate(p);
    const auto c = at3d::morphable::sample_identity(model->model, coeff_seed);
    const auto mesh = at3d::morphable::synthesize_mesh(model->model, c);
    const auto out = at3d::render::rasterize(mesh.positions, mesh.colors,
                                             at3d::mesh::full_topology(mesh), p);
    const std::string prefix(out_prefix);
    at3d::render::save_ppm(out.image, prefix + ".ppm");
    at3d::render::save_pgm(out.mask, prefix + "_mask.pgm");
    if (mask_pixels) *mask_pixels = out.mask.count();
  });
}

at3d_status at3d_embedding_create(int arch, uint64_t seed, int width, int height,
                                  at3d_embedding** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    if (arch != 0 && arch != 1)
      at3d::fail(at3d::ErrorCode::kInvalidArgument, "arch must be 0 (A) or 1 (B)");
    auto m = std::make_unique<at3d_embedding>();
    m->model = at3d::recognition::build_toy_model(
        arch == 0 ? at3d::recognition::Architecture::kA : at3d::recognition::Architecture::kB,
        seed, width, height);
    *out = m.release();
  });
}

at3d_status at3d_embedding_embed(const at3d_embedding* model, const double* image,
                                 size_t image_len, double* out, size_t out_len) {
  return guard([&] {
    need(model, "model");
    need(image, "image");
    need(out, "out");
    const auto& m = model->model;
    const size_t expected = static_cast<size_t>(m.input_width) * m.input_height * 3;
    if (image_len != expected)
      at3d::fail(at3d::ErrorCode::kDimensionMismatch,
                 "image has " + std::to_string(image_len) + " values, expected " +
                     std::to_string(expected));
    if (out_len != static_cast<size_t>(m.embedding_dim))
      at3d::fail(at3d::ErrorCode::kDimensionMismatch, "output buffer must hold " +
                                                          std::to_string(m.embedding_dim) +
                                                          " values");
    at3d::Image im(m.input_width, m.input_height);
    std::copy(image, image + image_len, im.data.begin());
    const at3d::VectorX e = at3d::recognition::embed(m, im).vector;
    std::copy(e.data(), e.data() + e.size(), out);
  });
}

at3d_status at3d_embedding_dim(const at3d_embedding* model, size_t* dim) {
  return guard([&] {
    need(model, "model");
    need(dim, "dim");
    *dim = static_cast<size_t>(model->model.embedding_dim);
  });
}

void at3d_embedding_free(at3d_embedding* model) { delete model; }

at3d_status at3d_run_experiment(const char* spec_path, const char* out_dir, int threads,
                                at3d_log_fn log, void* log_user, char** out_report_json) {
  return guard([&] {
    need(spec_path, "spec_path");
    const auto spec = at3d::harness::load_experiment_spec(spec_path);
    at3d::harness::RunOptions options;
    options.threads = threads;
    if (out_dir) options.output_dir = std::string(out_dir);
    if (log) options.log = [log, log_user](const std::string& m) { log(m.c_str(), log_user); };
    const auto report = at3d::harness::run_experiment(spec, options);
    if (out_report_json) *out_report_json = copy_string(report.to_json().dump(2));
  });
}

at3d_status at3d_gradcheck(const char* scope, uint64_t seed, char** out_json, int* passed) {
  return guard([&] {
    need(scope, "scope");
    const auto r = at3d::harness::run_gradcheck(at3d::harness::parse_scope(scope), seed);
    if (passed) *passed = r.passed() ? 1 : 0;
    if (out_json) *out_json = copy_string(r.to_json());
  });
}

at3d_status at3d_report_recount(const char* report_path, char** out_table_json,
                                int* consistent) {
  return guard([&] {
    need(report_path, "report_path");
    std::ifstream in(report_path);
    if (!in) at3d::fail(at3d::ErrorCode::kIo, std::string("cannot open ") + report_path);
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      at3d::fail(at3d::ErrorCode::kMalformedFile, std::string(report_path) + ": " + e.what());
    }
    const auto table = at3d::harness::recount_table(report);
    if (consistent) *consistent = at3d::harness::report_consistent(report) ? 1 : 0;
    if (out_table_json)
      *out_table_json = copy_string(nlohmann::json{{"methods", table.methods},
                                                   {"models", table.models},
                                                   {"percent", table.percent},
                                                   {"counted", table.counted}}
                                        .dump(2));
  });
}

}  // extern "C"
