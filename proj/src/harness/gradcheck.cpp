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

#include "at3d/harness/gradcheck.hpp"

#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "at3d/attack/pipeline.hpp"
#include "at3d/core/error.hpp"
#include "at3d/core/rng.hpp"
#include "at3d/harness/experiment_spec.hpp"
#include "at3d/morphable/morphable_model.hpp"
#include "at3d/recognition/embedding.hpp"
#include "at3d/render/rasterizer.hpp"

namespace at3d::harness {

namespace {

constexpr int kGridResolution = 16;
constexpr int kImageSize = 32;

// Neumaier-compensated sum of a[i] * b[i]; keeps probe losses accurate enough
// for small finite-difference steps.
double compensated_dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0, carry = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double term = a[i] * b[i];
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + carry;
}

VectorX random_vector(Eigen::Index n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  VectorX v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

VectorX gather(const VertexMatrix& m, const std::vector<int>& rows) {
  VectorX v(static_cast<Eigen::Index>(rows.size()) * 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < 3; ++c) v[static_cast<Eigen::Index>(3 * i + c)] = m(rows[i], c);
  return v;
}

VertexMatrix scatter(VertexMatrix m, const VectorX& v, const std::vector<int>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < 3; ++c) m(rows[i], c) = v[static_cast<Eigen::Index>(3 * i + c)];
  return m;
}

// Shared scene for the render-dependent scopes: a ~240-face central patch of a
// resolution-16 face seen slightly off-axis under directional light.
struct RenderScene {
  morphable::MorphableModel model;
  morphable::Coefficients coeffs;
  mesh::PatchTopology patch;
  render::RenderParams params;
};

RenderScene make_scene(std::uint64_t seed) {
  RenderScene s;
  s.model = morphable::generate_synthetic_model(seed, kGridResolution);
  s.coeffs = morphable::sample_identity(s.model, derive_seed(seed, 1));
  s.coeffs.gamma = default_experiment_illumination();
  s.coeffs.pose[0] = 0.05;
  s.coeffs.pose[1] = -0.08;
  s.coeffs.pose[2] = 0.03;
  mesh::Mesh canonical;
  canonical.positions = s.model.mean_shape;
  canonical.colors = s.model.mean_texture;
  canonical.faces = s.model.faces;
  s.patch = mesh::extract_patch(canonical, mesh::VertexPredicate([](const Vec3& p) {
                                  return std::abs(p.x()) <= 60.0 && std::abs(p.y()) <= 75.0;
                                }));
  render::RenderParams camera;
  camera.width = camera.height = kImageSize;
  camera.focal = render::RenderParams::framing_focal(kImageSize);
  s.params = attack::params_for(camera, s.coeffs);
  return s;
}

GradcheckGroup group(const std::string& name, FiniteDifferenceReport fd, double tol) {
  GradcheckGroup g;
  g.name = name;
  g.fd = fd;
  g.tolerance = tol;
  return g;
}

std::vector<GradcheckGroup> check_morphable(std::uint64_t seed) {
  const double tol = scope_tolerance(GradcheckScope::kMorphable);
  const auto model = morphable::generate_synthetic_model(seed, kGridResolution);
  const auto base = morphable::sample_identity(model, derive_seed(seed, 1));
  Rng rng(derive_seed(seed, 2));
  const Eigen::Index n3 = static_cast<Eigen::Index>(model.vertex_count()) * 3;
  const VectorX wp = random_vector(n3, rng);
  const VectorX wc = random_vector(n3, rng);
  constexpr double kQuad = 1e-3;

  // L = wp . S + wc . T + kQuad / 2 |S|^2
  auto loss = [&](const morphable::Coefficients& c) {
    const auto s = morphable::synthesize(model, c);
    const double* p = s.positions.data();
    const double* col = s.colors.data();
    const VectorX half_p = 0.5 * kQuad * Eigen::Map<const VectorX>(p, n3);
    return compensated_dot(wp.data(), p, n3) + compensated_dot(wc.data(), col, n3) +
           compensated_dot(half_p.data(), p, n3);
  };
  const auto s = morphable::synthesize(model, base);
  VertexMatrix dp(s.positions.rows(), 3), dc(s.colors.rows(), 3);
  flatten(dp) = wp + kQuad * Eigen::Map<const VectorX>(s.positions.data(), n3);
  flatten(dc) = wc;
  const auto g = morphable::synthesize_backward(model, dp, dc, s.color_active);

  std::vector<GradcheckGroup> out;
  const char* names[3] = {"alpha", "beta", "tau"};
  const VectorX* analytic[3] = {&g.alpha, &g.beta, &g.tau};
  for (int b = 0; b < 3; ++b) {
    auto block = [b](morphable::Coefficients& c) -> VectorX& {
      return b == 0 ? c.alpha : (b == 1 ? c.beta : c.tau);
    };
    morphable::Coefficients probe = base;
    ScalarFn f = [&](const VectorX& v) {
      block(probe) = v;
      return loss(probe);
    };
    out.push_back(group(names[b],
                        finite_difference_check(f, block(probe), *analytic[b], 1e-3, seed),
                        tol));
  }
  return out;
}

std::vector<GradcheckGroup> check_recognition(std::uint64_t seed) {
  const double tol = scope_tolerance(GradcheckScope::kRecognition);
  std::vector<GradcheckGroup> out;
  for (auto arch : {recognition::Architecture::kA, recognition::Architecture::kB}) {
    const auto model = recognition::build_toy_model(arch, derive_seed(seed, 3), kImageSize,
                                                    kImageSize);
    Rng rng(derive_seed(seed, 4));
    Image x(kImageSize, kImageSize);
    for (double& v : x.data) v = rng.uniform(0.0, 255.0);
    const VectorX u = random_vector(model.embedding_dim, rng);
    const auto e = recognition::embed(model, x);
    const Image g = recognition::embed_backward(model, e.cache, u);
    const VectorX params = Eigen::Map<const VectorX>(x.data.data(), x.size());
    const VectorX analytic = Eigen::Map<const VectorX>(g.data.data(), g.size());
    Image probe = x;
    ScalarFn f = [&](const VectorX& v) {
      std::copy(v.data(), v.data() + v.size(), probe.data.begin());
      const VectorX y = recognition::embed(model, probe).vector;
      return compensated_dot(u.data(), y.data(), static_cast<std::size_t>(u.size()));
    };
    out.push_back(group(std::string("image/") + recognition::architecture_name(arch),
                        finite_difference_check(f, params, analytic, 0.1, seed), tol));
  }
  return out;
}

std::vector<GradcheckGroup> check_render(std::uint64_t seed) {
  const double tol = scope_tolerance(GradcheckScope::kRender);
  const RenderScene s = make_scene(seed);
  const auto syn = morphable::synthesize(s.model, s.coeffs);
  const auto base = render::rasterize(syn.positions, syn.colors, s.patch, s.params);
  Rng rng(derive_seed(seed, 5));
  Image w(kImageSize, kImageSize);
  for (double& v : w.data) v = rng.uniform(-1.0, 1.0);
  const auto g = render::render_backward(base, syn.positions, syn.colors, s.params, w);

  // Probe: weighted image sum; declines when any pixel changed face.
  auto probe = [&](const VertexMatrix& p, const VertexMatrix& c,
                   const render::RenderParams& params) -> std::optional<double> {
    const auto r = render::rasterize(p, c, s.patch, params);
    if (r.face_id != base.face_id) return std::nullopt;
    return compensated_dot(w.data.data(), r.image.data.data(), w.size());
  };
  const std::vector<int>& rows = s.patch.kept_vertices;
  std::vector<GradcheckGroup> out;
  ProbeFn fp = [&](const VectorX& v) {
    return probe(scatter(syn.positions, v, rows), syn.colors, s.params);
  };
  out.push_back(group("positions",
                      finite_difference_check(fp, gather(syn.positions, rows),
                                              gather(g.positions, rows), 1e-2, seed),
                      tol));
  ProbeFn fc = [&](const VectorX& v) {
    return probe(syn.positions, scatter(syn.colors, v, rows), s.params);
  };
  out.push_back(group("colors",
                      finite_difference_check(fc, gather(syn.colors, rows),
                                              gather(g.colors, rows), 1e-2, seed),
                      tol));
  ProbeFn fg = [&](const VectorX& v) {
    render::RenderParams p = s.params;
    p.illumination = v;
    return probe(syn.positions, syn.colors, p);
  };
  out.push_back(group("gamma",
                      finite_difference_check(fg, s.params.illumination, g.gamma, 1e-3, seed),
                      tol));
  return out;
}

std::vector<GradcheckGroup> check_end2end(std::uint64_t seed) {
  const double tol = scope_tolerance(GradcheckScope::kEnd2End);
  const RenderScene s = make_scene(seed);
  const auto model = recognition::build_toy_model(recognition::Architecture::kA,
                                                  derive_seed(seed, 3), kImageSize, kImageSize);
  // Attacker image: another identity rendered in full; target: a third one.
  const auto full = mesh::full_topology(morphable::synthesize_mesh(s.model, s.coeffs));
  auto render_full = [&](std::uint64_t salt) {
    morphable::Coefficients c = morphable::sample_identity(s.model, derive_seed(seed, salt));
    c.gamma = s.coeffs.gamma;
    const auto syn = morphable::synthesize(s.model, c);
    const auto r = render::rasterize(syn.positions, syn.colors, full,
                                     attack::params_for(s.params, c));
    return render::composite(r, Image(kImageSize, kImageSize, 100.0));
  };
  attack::Scene scene;
  scene.model = &model;
  scene.patch = s.patch;
  scene.params = s.params;
  scene.attacker_image = render_full(6);
  scene.target_embedding = recognition::embed(model, render_full(7)).vector;
  scene.mode = attack::AttackMode::kImpersonate;

  const auto syn = morphable::synthesize(s.model, s.coeffs);
  const auto ev = attack::evaluate_scene(scene, syn.positions, syn.colors, true);
  const auto g =
      morphable::synthesize_backward(s.model, ev.d_positions, ev.d_colors, syn.color_active);

  std::vector<GradcheckGroup> out;
  const char* names[3] = {"alpha", "beta", "tau"};
  const VectorX* analytic[3] = {&g.alpha, &g.beta, &g.tau};
  const VectorX* stds[3] = {&s.model.std_id, &s.model.std_exp, &s.model.std_tex};
  for (int b = 0; b < 3; ++b) {
    auto block = [b](morphable::Coefficients& c) -> VectorX& {
      return b == 0 ? c.alpha : (b == 1 ? c.beta : c.tau);
    };
    morphable::Coefficients probe = s.coeffs;
    const VectorX& sd = *stds[b];
    // Checked in coeff_std-normalized coordinates, as the attack optimizes them.
    ProbeFn f = [&](const VectorX& z) -> std::optional<double> {
      block(probe) = z.cwiseProduct(sd);
      const auto ps = morphable::synthesize(s.model, probe);
      const auto e = attack::evaluate_scene(scene, ps.positions, ps.colors, false);
      if (e.render.face_id != ev.render.face_id) return std::nullopt;
      return e.loss;
    };
    morphable::Coefficients c0 = s.coeffs;
    out.push_back(group(names[b],
                        finite_difference_check(f, block(c0).cwiseQuotient(sd),
                                                analytic[b]->cwiseProduct(sd), 1e-3, seed),
                        tol));
  }
  return out;
}

}  // namespace

const char* scope_name(GradcheckScope scope) {
  switch (scope) {
    case GradcheckScope::kMorphable: return "morphable";
    case GradcheckScope::kRender: return "render";
    case GradcheckScope::kRecognition: return "recognition";
    case GradcheckScope::kEnd2End: return "end2end";
  }
  return "morphable";
}

GradcheckScope parse_scope(const std::string& name) {
  if (name == "morphable") return GradcheckScope::kMorphable;
  if (name == "render") return GradcheckScope::kRender;
  if (name == "recognition") return GradcheckScope::kRecognition;
  if (name == "end2end") return GradcheckScope::kEnd2End;
  fail(ErrorCode::kValidation, "unknown gradcheck scope '" + name +
                                   "' (expected morphable, render, recognition, end2end)");
}

double scope_tolerance(GradcheckScope scope) {
  switch (scope) {
    case GradcheckScope::kMorphable: return 1e-4;
    case GradcheckScope::kRender: return 1e-3;
    case GradcheckScope::kRecognition: return 1e-3;
    case GradcheckScope::kEnd2End: return 5e-3;
  }
  return 0.0;
}

bool GradcheckReport::passed() const {
  if (groups.empty()) return false;
  for (const auto& g : groups)
    if (!g.passed()) return false;
  return true;
}

double GradcheckReport::max_relative_error() const {
  double m = 0.0;
  for (const auto& g : groups) m = std::max(m, g.fd.max_relative_error);
  return m;
}

std::string GradcheckReport::to_json() const {
  nlohmann::json j;
  j["scope"] = scope_name(scope);
  j["seed"] = seed;
  j["passed"] = passed();
  j["max_relative_error"] = max_relative_error();
  j["seconds"] = seconds;
  j["groups"] = nlohmann::json::array();
  for (const auto& g : groups)
    j["groups"].push_back({{"name", g.name},
                           {"max_relative_error", g.fd.max_relative_error},
                           {"tolerance", g.tolerance},
                           {"checked", g.fd.checked},
                           {"skipped", g.fd.skipped},
                           {"worst_index", g.fd.worst_index},
                           {"passed", g.passed()}});
  return j.dump(2);
}

GradcheckReport run_gradcheck(GradcheckScope scope, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GradcheckReport r;
  r.scope = scope;
  r.seed = seed;
  switch (scope) {
    case GradcheckScope::kMorphable: r.groups = check_morphable(seed); break;
    case GradcheckScope::kRender: r.groups = check_render(seed); break;
    case GradcheckScope::kRecognition: r.groups = check_recognition(seed); break;
    case GradcheckScope::kEnd2End: r.groups = check_end2end(seed); break;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace at3d::harness
