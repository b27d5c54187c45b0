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

/* Exercises the shared library through its C interface only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "at3d/at3d.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

/* Sum of all pixel bytes of a binary PPM/PGM, or -1 on a parse failure. */
static long pixel_sum(const char* path) {
  FILE* f = fopen(path, "rb");
  if (!f) return -1;
  char magic[3] = {0};
  int w = 0, h = 0, maxval = 0;
  if (fscanf(f, "%2s %d %d %d", magic, &w, &h, &maxval) != 4) {
    fclose(f);
    return -1;
  }
  fgetc(f);
  const int channels = strcmp(magic, "P6") == 0 ? 3 : 1;
  long sum = 0;
  for (long i = 0; i < (long)w * h * channels; ++i) {
    const int c = fgetc(f);
    if (c == EOF) {
      fclose(f);
      return -1;
    }
    sum += c;
  }
  fclose(f);
  return sum;
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  char path[1024];

  EXPECT(strlen(at3d_version()) > 0);
  EXPECT(strcmp(at3d_status_name(AT3D_ERR_IO), "i/o error") == 0);

  at3d_morphable* model = NULL;
  EXPECT(at3d_morphable_generate(7, 4, &model) == AT3D_ERR_INVALID_ARGUMENT);
  EXPECT(model == NULL);
  EXPECT(strlen(at3d_last_error()) > 0);

  EXPECT(at3d_morphable_generate(7, 16, &model) == AT3D_OK);
  at3d_morphable_info info;
  EXPECT(at3d_morphable_get_info(model, &info) == AT3D_OK);
  EXPECT(info.vertices == 256);
  EXPECT(info.faces == 450);
  EXPECT(info.identity_dim == 80 && info.expression_dim == 64 && info.texture_dim == 80);

  snprintf(path, sizeof path, "%s/capi_model.bin", dir);
  EXPECT(at3d_morphable_save(model, path) == AT3D_OK);
  at3d_morphable* loaded = NULL;
  EXPECT(at3d_morphable_load(path, &loaded) == AT3D_OK);
  at3d_morphable_info info2;
  EXPECT(at3d_morphable_get_info(loaded, &info2) == AT3D_OK);
  EXPECT(info2.vertices == info.vertices && info2.seed == 7);
  at3d_morphable_free(loaded);

  at3d_render_params params;
  at3d_render_params_default(&params);
  params.width = params.height = 32;
  size_t covered = 0;
  snprintf(path, sizeof path, "%s/capi_front", dir);
  EXPECT(at3d_render_identity(model, 3, &params, path, &covered) == AT3D_OK);
  EXPECT(covered > 0);
  snprintf(path, sizeof path, "%s/capi_front.ppm", dir);
  EXPECT(pixel_sum(path) > 0);

  params.pose[3] = 5000.0; /* far off to the side */
  snprintf(path, sizeof path, "%s/capi_off", dir);
  EXPECT(at3d_render_identity(model, 3, &params, path, &covered) == AT3D_OK);
  EXPECT(covered == 0);
  snprintf(path, sizeof path, "%s/capi_off.ppm", dir);
  EXPECT(pixel_sum(path) == 0);
  snprintf(path, sizeof path, "%s/capi_off_mask.pgm", dir);
  EXPECT(pixel_sum(path) == 0);

  params.width = 2;
  EXPECT(at3d_render_identity(model, 3, &params, path, NULL) == AT3D_ERR_INVALID_ARGUMENT);
  at3d_morphable_free(model);

  at3d_embedding* net = NULL;
  EXPECT(at3d_embedding_create(0, 11, 32, 32, &net) == AT3D_OK);
  size_t dim = 0;
  EXPECT(at3d_embedding_dim(net, &dim) == AT3D_OK && dim == 128);
  double* image = malloc(sizeof(double) * 32 * 32 * 3);
  for (int i = 0; i < 32 * 32 * 3; ++i) image[i] = (i * 37) % 256;
  double e[128];
  EXPECT(at3d_embedding_embed(net, image, 32 * 32 * 3, e, 128) == AT3D_OK);
  double norm = 0.0;
  for (int i = 0; i < 128; ++i) norm += e[i] * e[i];
  EXPECT(fabs(norm - 1.0) < 1e-12);
  EXPECT(at3d_embedding_embed(net, image, 10, e, 128) == AT3D_ERR_DIMENSION_MISMATCH);
  free(image);
  at3d_embedding_free(net);

  at3d_mesh* mesh = NULL;
  snprintf(path, sizeof path, "%s/does_not_exist.obj", dir);
  EXPECT(at3d_mesh_load_obj(path, &mesh) == AT3D_ERR_IO);
  snprintf(path, sizeof path, "%s/capi_tet.obj", dir);
  FILE* f = fopen(path, "w");
  fputs("v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nf 1 2 3\nf 1 4 2\nf 1 3 4\nf 2 4 3\n", f);
  fclose(f);
  EXPECT(at3d_mesh_load_obj(path, &mesh) == AT3D_OK);
  size_t nv = 0, nf = 0;
  EXPECT(at3d_mesh_counts(mesh, &nv, &nf) == AT3D_OK && nv == 4 && nf == 4);
  double avg = 0.0;
  EXPECT(at3d_mesh_average_curvature(mesh, 0.5, 1, &avg) == AT3D_OK);
  EXPECT(fabs(avg - 3.14159265358979323846) < 1e-12);
  char* json = NULL;
  EXPECT(at3d_mesh_curvature_report_json(mesh, 0.5, 1, &json) == AT3D_OK);
  EXPECT(json && strstr(json, "average_measure"));
  at3d_string_free(json);
  at3d_mesh_free(mesh);

  const char* paths[] = {path};
  const double radii[] = {0.5, 10.0};
  char* csv = NULL;
  EXPECT(at3d_curvature_csv(paths, 1, radii, 2, &csv) == AT3D_OK);
  EXPECT(csv && strncmp(csv, "mesh,radius", 11) == 0);
  at3d_string_free(csv);

  int passed = 0;
  EXPECT(at3d_gradcheck("morphable", 1, &json, &passed) == AT3D_OK);
  EXPECT(passed == 1);
  at3d_string_free(json);
  EXPECT(at3d_gradcheck("nonsense", 1, &json, &passed) != AT3D_OK);

  if (failures) fprintf(stderr, "%d C API check(s) failed\n", failures);
  else printf("C API checks passed\n");
  return failures ? 1 : 0;
}
