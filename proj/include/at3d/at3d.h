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

/* C interface to the at3d library. Objects are opaque handles created and
 * released by the library; every fallible call returns an at3d_status and
 * leaves a message for at3d_last_error() (per thread) on failure. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with at3d_string_free(). */
#ifndef AT3D_AT3D_H_
#define AT3D_AT3D_H_

#include <stddef.h>
#include <stdint.h>

#if defined(AT3D_BUILDING_LIBRARY)
#define AT3D_API __attribute__((visibility("default")))
#else
#define AT3D_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum at3d_status {
  AT3D_OK = 0,
  AT3D_ERR_INVALID_ARGUMENT = 1,
  AT3D_ERR_DIMENSION_MISMATCH = 2,
  AT3D_ERR_EMPTY_PATCH = 3,
  AT3D_ERR_ISOLATED_VERTEX = 4,
  AT3D_ERR_IO = 5,
  AT3D_ERR_MALFORMED_FILE = 6,
  AT3D_ERR_NON_FINITE = 7,
  AT3D_ERR_VALIDATION = 8,
  AT3D_ERR_TOPOLOGY_MISMATCH = 9,
  AT3D_ERR_CACHE_MISMATCH = 10,
  AT3D_ERR_INSUFFICIENT_DATA = 11,
  AT3D_ERR_INTERNAL = 99
} at3d_status;

typedef struct at3d_mesh at3d_mesh;
typedef struct at3d_morphable at3d_morphable;
typedef struct at3d_embedding at3d_embedding;

AT3D_API const char* at3d_version(void);
AT3D_API const char* at3d_last_error(void);
AT3D_API const char* at3d_status_name(at3d_status status);
AT3D_API void at3d_string_free(char* s);

/* Meshes */
AT3D_API at3d_status at3d_mesh_load_obj(const char* path, at3d_mesh** out);
AT3D_API at3d_status at3d_mesh_save_obj(const at3d_mesh* mesh, const char* path);
AT3D_API at3d_status at3d_mesh_counts(const at3d_mesh* mesh, size_t* vertices, size_t* faces);
AT3D_API at3d_status at3d_mesh_average_curvature(const at3d_mesh* mesh, double radius,
                                                 int interior_only, double* out);
AT3D_API at3d_status at3d_mesh_curvature_report_json(const at3d_mesh* mesh, double radius,
                                                     int interior_only, char** out_json);
AT3D_API void at3d_mesh_free(at3d_mesh* mesh);

/* CSV rows (mesh, radius, average_measure, interior_vertices, error) for each
 * mesh file at each radius. Unreadable files become rows with an error. */
AT3D_API at3d_status at3d_curvature_csv(const char* const* paths, size_t path_count,
                                        const double* radii, size_t radius_count,
                                        char** out_csv);

/* Morphable models */
typedef struct at3d_morphable_info {
  size_t vertices;
  size_t faces;
  int identity_dim;
  int expression_dim;
  int texture_dim;
  int resolution;
  uint64_t seed;
} at3d_morphable_info;

AT3D_API at3d_status at3d_morphable_generate(uint64_t seed, int resolution, at3d_morphable** out);
AT3D_API at3d_status at3d_morphable_load(const char* path, at3d_morphable** out);
AT3D_API at3d_status at3d_morphable_save(const at3d_morphable* model, const char* path);
AT3D_API at3d_status at3d_morphable_get_info(const at3d_morphable* model, at3d_morphable_info* out);
AT3D_API void at3d_morphable_free(at3d_morphable* model);

/* Rendering. focal <= 0 frames the face for the image height. */
typedef struct at3d_render_params {
  int width;
  int height;
  double focal;
  double near_clip;
  double pose[6];          /* Euler X, Y, Z (radians), translation x, y, z */
  double illumination[9];  /* SH coefficients */
} at3d_render_params;

AT3D_API void at3d_render_params_default(at3d_render_params* params);

/* Renders the full face of the identity sampled with coeff_seed and writes
 * <out_prefix>.ppm (image) and <out_prefix>_mask.pgm (coverage). */
AT3D_API at3d_status at3d_render_identity(const at3d_morphable* model, uint64_t coeff_seed,
                                          const at3d_render_params* params,
                                          const char* out_prefix, size_t* mask_pixels);

/* Recognition models. arch: 0 = A, 1 = B. Images are height x width x 3
 * interleaved doubles in [0, 255]. */
AT3D_API at3d_status at3d_embedding_create(int arch, uint64_t seed, int width, int height,
                                           at3d_embedding** out);
AT3D_API at3d_status at3d_embedding_embed(const at3d_embedding* model, const double* image,
                                          size_t image_len, double* out, size_t out_len);
AT3D_API at3d_status at3d_embedding_dim(const at3d_embedding* model, size_t* dim);
AT3D_API void at3d_embedding_free(at3d_embedding* model);

/* Experiments */
typedef void (*at3d_log_fn)(const char* message, void* user);

/* Runs the experiment described by the JSON spec at spec_path. out_dir, when
 * non-NULL, overrides the output directory named in the experiment file. */
AT3D_API at3d_status at3d_run_experiment(const char* spec_path, const char* out_dir, int threads,
                                         at3d_log_fn log, void* log_user,
                                         char** out_report_json);

/* scope: "morphable", "render", "recognition" or "end2end". */
AT3D_API at3d_status at3d_gradcheck(const char* scope, uint64_t seed, char** out_json,
                                    int* passed);

/* Recomputes the success table of a report file from its per-pair records. */
AT3D_API at3d_status at3d_report_recount(const char* report_path, char** out_table_json,
                                         int* consistent);

#ifdef __cplusplus
}
#endif

#endif /* AT3D_AT3D_H_ */
