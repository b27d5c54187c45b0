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

// Command-line front end over the C API.
//
//   at3d gen-model --resolution 32 --out model.bin
//   at3d render --model model.bin --coeff-seed 3 --out face
//   at3d attack --spec spec.json --threads 4
//   at3d gradcheck --scope all --seeds 1,2,3
//   at3d curvature a.obj b.obj --radii 5,10 --out curvature.csv
//   at3d eval --report out/report.json
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "at3d/at3d.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int exit_code(at3d_status s) {
  switch (s) {
    case AT3D_OK: return 0;
    case AT3D_ERR_INVALID_ARGUMENT:
    case AT3D_ERR_DIMENSION_MISMATCH:
    case AT3D_ERR_VALIDATION:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

int report(at3d_status s, const char* what) {
  if (s == AT3D_OK) return 0;
  std::fprintf(stderr, "at3d %s: %s: %s\n", what, at3d_status_name(s), at3d_last_error());
  return exit_code(s);
}

struct StringDeleter {
  void operator()(char* s) const { at3d_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
};

int gen_model(const Globals& g, int resolution) {
  if (g.out.empty()) {
    std::fprintf(stderr, "at3d gen-model: --out is required\n");
    return kExitValidation;
  }
  at3d_morphable* model = nullptr;
  if (int rc = report(at3d_morphable_generate(g.seed, resolution, &model), "gen-model")) return rc;
  std::unique_ptr<at3d_morphable, void (*)(at3d_morphable*)> hold(model, at3d_morphable_free);
  if (int rc = report(at3d_morphable_save(model, g.out.c_str()), "gen-model")) return rc;
  at3d_morphable_info info{};
  at3d_morphable_get_info(model, &info);
  std::printf("wrote %s\nvertices n = %zu\nfaces m = %zu\nidentity basis %zu x %d\n"
              "expression basis %zu x %d\ntexture basis %zu x %d\n",
              g.out.c_str(), info.vertices, info.faces, 3 * info.vertices, info.identity_dim,
              3 * info.vertices, info.expression_dim, 3 * info.vertices, info.texture_dim);
  return 0;
}

struct RenderArgs {
  std::string model;
  std::uint64_t coeff_seed = 0;
  int width = 112;
  int height = 112;
  double focal = 0.0;
  double near_clip = 1.0;
  std::vector<double> pose;
  std::vector<double> illumination;
};

int render(const Globals& g, const RenderArgs& a) {
  if (g.out.empty()) {
    std::fprintf(stderr, "at3d render: --out (file prefix) is required\n");
    return kExitValidation;
  }
  at3d_render_params p;
  at3d_render_params_default(&p);
  p.width = a.width;
  p.height = a.height;
  p.focal = a.focal;
  p.near_clip = a.near_clip;
  if (!a.pose.empty()) {
    if (a.pose.size() != 6) {
      std::fprintf(stderr, "at3d render: --pose needs 6 values\n");
      return kExitValidation;
    }
    std::copy(a.pose.begin(), a.pose.end(), p.pose);
  }
  if (!a.illumination.empty()) {
    if (a.illumination.size() != 9) {
      std::fprintf(stderr, "at3d render: --illumination needs 9 values\n");
      return kExitValidation;
    }
    std::copy(a.illumination.begin(), a.illumination.end(), p.illumination);
  }
  at3d_morphable* model = nullptr;
  if (int rc = report(at3d_morphable_load(a.model.c_str(), &model), "render")) return rc;
  std::unique_ptr<at3d_morphable, void (*)(at3d_morphable*)> hold(model, at3d_morphable_free);
  size_t covered = 0;
  if (int rc = report(at3d_render_identity(model, a.coeff_seed, &p, g.out.c_str(), &covered),
                      "render"))
    return rc;
  std::printf("wrote %s.ppm and %s_mask.pgm (%zu covered pixels)\n", g.out.c_str(),
              g.out.c_str(), covered);
  return 0;
}

void print_log(const char* message, void*) { std::fprintf(stderr, "%s\n", message); }

int attack(const Globals& g, const std::string& spec, bool quiet) {
  char* json = nullptr;
  const at3d_status s = at3d_run_experiment(spec.c_str(), g.out.empty() ? nullptr : g.out.c_str(),
                                            g.threads, quiet ? nullptr : print_log, nullptr, &json);
  OwnedString hold(json);
  if (int rc = report(s, "attack")) return rc;
  // Summary table only; the full report is on disk.
  const std::string text(json);
  const auto pos = text.find("\"table\"");
  std::printf("%s\n", pos == std::string::npos ? text.c_str() : text.substr(pos, 400).c_str());
  return 0;
}

int gradcheck(const std::string& scope, const std::vector<std::uint64_t>& seeds) {
  std::vector<std::string> scopes;
  if (scope == "all")
    scopes = {"morphable", "recognition", "render", "end2end"};
  else
    scopes = {scope};
  bool all_passed = true;
  for (const auto& sc : scopes) {
    for (std::uint64_t seed : seeds) {
      char* json = nullptr;
      int passed = 0;
      const at3d_status s = at3d_gradcheck(sc.c_str(), seed, &json, &passed);
      OwnedString hold(json);
      if (int rc = report(s, "gradcheck")) return rc;
      std::printf("%s\n", json);
      all_passed = all_passed && passed;
    }
  }
  std::printf("gradcheck %s\n", all_passed ? "PASSED" : "FAILED");
  return all_passed ? 0 : kExitRuntime;
}

int curvature(const Globals& g, const std::vector<std::string>& meshes,
              const std::vector<double>& radii) {
  std::vector<const char*> paths;
  for (const auto& m : meshes) paths.push_back(m.c_str());
  char* csv = nullptr;
  const at3d_status s =
      at3d_curvature_csv(paths.data(), paths.size(), radii.data(), radii.size(), &csv);
  OwnedString hold(csv);
  if (int rc = report(s, "curvature")) return rc;
  if (g.out.empty()) {
    std::fputs(csv, stdout);
  } else {
    std::ofstream out(g.out);
    out << csv;
    if (!out) {
      std::fprintf(stderr, "at3d curvature: cannot write %s\n", g.out.c_str());
      return kExitRuntime;
    }
  }
  // Per-file failures are rows with an error column; flag them in the exit code.
  const std::string text(csv);
  for (std::size_t pos = text.find('\n'); pos != std::string::npos;) {
    const std::size_t end = text.find('\n', pos + 1);
    if (end == std::string::npos) break;
    const std::string line = text.substr(pos + 1, end - pos - 1);
    if (!line.empty() && line.back() != ',') return kExitRuntime;
    pos = end;
  }
  return 0;
}

int eval(const std::string& report_path) {
  char* json = nullptr;
  int consistent = 0;
  const at3d_status s = at3d_report_recount(report_path.c_str(), &json, &consistent);
  OwnedString hold(json);
  if (int rc = report(s, "eval")) return rc;
  std::printf("%s\nrecount %s the stored table\n", json, consistent ? "matches" : "DIFFERS FROM");
  return consistent ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial textured 3D face mesh toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Global seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path, prefix or directory");

  auto* gen = app.add_subcommand("gen-model", "Generate and save a synthetic morphable model");
  int resolution = 32;
  gen->add_option("--resolution", resolution, "Grid vertices per side (>= 8)")->capture_default_str();

  auto* ren = app.add_subcommand("render", "Render a sampled identity to PPM + PGM mask");
  RenderArgs ra;
  ren->add_option("--model", ra.model, "Morphable model file")->required();
  ren->add_option("--coeff-seed", ra.coeff_seed, "Identity sampling seed")->capture_default_str();
  ren->add_option("--width", ra.width)->capture_default_str();
  ren->add_option("--height", ra.height)->capture_default_str();
  ren->add_option("--focal", ra.focal, "Focal length in pixels (default frames the face)");
  ren->add_option("--near", ra.near_clip)->capture_default_str();
  ren->add_option("--pose", ra.pose, "Euler X Y Z (rad) and translation x y z")->delimiter(',');
  ren->add_option("--illumination", ra.illumination, "9 SH coefficients")->delimiter(',');

  auto* att = app.add_subcommand("attack", "Run an experiment spec");
  std::string spec;
  bool quiet = false;
  att->add_option("--spec", spec, "Experiment spec JSON")->required();
  att->add_flag("--quiet", quiet, "No progress log");

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
  std::string scope = "all";
  std::vector<std::uint64_t> seeds;
  grad->add_option("--scope", scope)
      ->check(CLI::IsMember({"morphable", "render", "recognition", "end2end", "all"}))
      ->capture_default_str();
  grad->add_option("--seeds", seeds, "Seeds (default: the global seed)")->delimiter(',');

  auto* curv = app.add_subcommand("curvature", "Average curvature table for OBJ meshes");
  std::vector<std::string> meshes;
  std::vector<double> radii;
  curv->add_option("meshes", meshes, "OBJ files")->required();
  curv->add_option("--radii", radii, "Ball radii")->required()->delimiter(',');

  auto* ev = app.add_subcommand("eval", "Recount a report's success table");
  std::string report_path;
  ev->add_option("--report", report_path, "report.json")->required();

  for (auto* sub : {gen, ren, att, grad, curv, ev}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  if (*gen) return gen_model(g, resolution);
  if (*ren) return render(g, ra);
  if (*att) return attack(g, spec, quiet);
  if (*grad) {
    if (seeds.empty()) seeds.push_back(g.seed);
    return gradcheck(scope, seeds);
  }
  if (*curv) return curvature(g, meshes, radii);
  if (*ev) return eval(report_path);
  return kExitValidation;
}
