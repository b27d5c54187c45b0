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

#include <chrono>
#include <cmath>

#include "at3d/attack/attacks.hpp"
#include "at3d/core/error.hpp"
#include "at3d/core/rng.hpp"
#include "at3d/mesh/regularizers.hpp"

namespace at3d::attack {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_runnable(const AttackConfig& c) {
  require(c.iterations >= 0, ErrorCode::kInvalidArgument, "attack: iterations must be >= 0");
  require(std::isfinite(c.budget) && c.budget >= 0.0, ErrorCode::kInvalidArgument,
          "attack: budget must be >= 0");
  const double lr = c.effective_learning_rate();
  require(std::isfinite(lr) && lr >= 0.0, ErrorCode::kInvalidArgument,
          "attack: learning rate must be >= 0");
}

void check_finite(double loss, int iteration, const char* method, const AttackConfig& config) {
  if (std::isfinite(loss)) return;
  fail(ErrorCode::kNonFinite, std::string(method) + ": non-finite loss at iteration " +
                                  std::to_string(iteration) + "; config " +
                                  to_json(config).dump());
}

VectorX draw_noise(const VectorX& stddev, Rng& rng) {
  VectorX v(stddev.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal(0.0, stddev[i]);
  return v;
}

mesh::Mesh patch_mesh(const morphable::Synthesis& s, const mesh::PatchTopology& patch) {
  mesh::Mesh m;
  m.positions = s.positions;
  m.colors = s.colors;
  m.faces = patch.faces;
  return m;
}

VectorX gather(const VertexMatrix& m, const std::vector<int>& rows) {
  VectorX v(static_cast<Eigen::Index>(rows.size()) * 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < 3; ++c) v[static_cast<Eigen::Index>(3 * i + c)] = m(rows[i], c);
  return v;
}

void scatter(const VectorX& v, const std::vector<int>& rows, VertexMatrix& m) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < 3; ++c) m(rows[i], c) = v[static_cast<Eigen::Index>(3 * i + c)];
}

}  // namespace

morphable::Coefficients init_coefficients(const InitStrategies& strategy,
                                          const morphable::Coefficients& attacker,
                                          const morphable::Coefficients& victim,
                                          const morphable::MorphableModel& model,
                                          std::uint64_t seed) {
  morphable::validate(attacker);
  morphable::validate(victim);
  Rng rng(seed);
  morphable::Coefficients out = attacker;
  switch (strategy.shape) {
    case InitStrategy::kAVictim:
    case InitStrategy::kVictim:
      out.alpha = victim.alpha;
      out.beta = victim.beta;
      break;
    case InitStrategy::kAttacker:
      break;
    case InitStrategy::kNoise:
      out.alpha = draw_noise(model.std_id, rng);
      out.beta = draw_noise(model.std_exp, rng);
      break;
  }
  switch (strategy.texture) {
    case InitStrategy::kAVictim:
    case InitStrategy::kVictim:
      out.tau = victim.tau;
      break;
    case InitStrategy::kAttacker:
      break;
    case InitStrategy::kNoise:
      out.tau = draw_noise(model.std_tex, rng);
      break;
  }
  if (strategy.shape == InitStrategy::kVictim && strategy.texture == InitStrategy::kVictim) {
    out.gamma = victim.gamma;
    out.pose = victim.pose;
  }
  return out;
}

AttackResult at3d_p(const AttackConfig& config, const At3dInputs& in,
                    const SubUpdateObserver& observer) {
  const auto start = Clock::now();
  check_runnable(config);
  require(in.morphable && in.white_box, ErrorCode::kInvalidArgument,
          "at3d_p: morphable and white-box models are required");
  require(in.patch.face_count() > 0, ErrorCode::kEmptyPatch, "at3d_p: empty patch topology");
  const morphable::MorphableModel& model = *in.morphable;
  for (const VectorX* s : {&model.std_id, &model.std_exp, &model.std_tex})
    require((s->array() > 0.0).all(), ErrorCode::kInvalidArgument,
            "at3d_p: coefficient deviations must be positive");

  const morphable::Coefficients init =
      init_coefficients(config.init_strategy, in.attacker.coefficients,
                        in.victim.coefficients, model, derive_seed(config.seed, 0x1417));

  Scene scene;
  scene.model = in.white_box;
  scene.patch = in.patch;
  scene.params = params_for(in.camera, init);
  scene.attacker_image = in.attacker.image;
  scene.target_embedding = recognition::embed(*in.white_box, in.target_image).vector;
  scene.mode = config.mode;

  const VectorX* stds[3] = {&model.std_id, &model.std_exp, &model.std_tex};
  const VectorX refs[3] = {init.alpha, init.beta, init.tau};
  AdamState states[3] = {AdamState(init.alpha.size()), AdamState(init.beta.size()),
                         AdamState(init.tau.size())};
  auto block_of = [](morphable::Coefficients& c, int b) -> VectorX& {
    return b == 0 ? c.alpha : (b == 1 ? c.beta : c.tau);
  };
  const double lr = config.effective_learning_rate();

  AttackResult result;
  result.method = "AT3D-P";
  morphable::Coefficients current = init;
  const morphable::Synthesis init_syn = morphable::synthesize(model, init);
  result.initial_mesh = patch_mesh(init_syn, in.patch);

  for (int n = 0; n < config.iterations; ++n) {
    for (int b = 0; b < 3; ++b) {
      const morphable::Coefficients before = current;
      const morphable::Synthesis syn = morphable::synthesize(model, current);
      const SceneEvaluation ev = evaluate_scene(scene, syn.positions, syn.colors, true);
      check_finite(ev.loss, n, "at3d_p", config);
      if (b == 0) {
        result.loss_trace.push_back(ev.loss);
        result.similarity_trace.push_back(ev.similarity);
      }
      const morphable::CoefficientGradients g =
          morphable::synthesize_backward(model, ev.d_positions, ev.d_colors, syn.color_active);
      const VectorX& grad = b == 0 ? g.alpha : (b == 1 ? g.beta : g.tau);
      const VectorX& sd = *stds[b];

      // Adam runs on z = c / std, so every coordinate moves at the same scale.
      VectorX z = block_of(current, b).cwiseQuotient(sd);
      adam_step(states[b], z, grad.cwiseProduct(sd), lr, config.adam);
      block_of(current, b) = project_budget(z.cwiseProduct(sd), refs[b], config.budget,
                                            BudgetSpace::kCoeffNormalized, &sd);
      if (observer) observer({n, static_cast<CoefficientBlock>(b), before, current, ev.loss});
    }
    double dev = 0.0;
    for (int b = 0; b < 3; ++b)
      dev = std::max(dev, budget_deviation(block_of(current, b), refs[b],
                                           BudgetSpace::kCoeffNormalized, stds[b]));
    result.budget_trace.push_back(dev);
  }

  const morphable::Synthesis fin = morphable::synthesize(model, current);
  const SceneEvaluation ev = evaluate_scene(scene, fin.positions, fin.colors, false);
  const SceneEvaluation ev0 =
      config.iterations == 0 ? ev
                             : evaluate_scene(scene, init_syn.positions, init_syn.colors, false);
  check_finite(ev.loss, config.iterations, "at3d_p", config);
  result.initial_loss = ev0.loss;
  result.final_loss = ev.loss;
  result.final_similarity = ev.similarity;
  result.adversarial_image = ev.composite;
  result.final_mesh = patch_mesh(fin, in.patch);
  result.final_coefficients = current;
  result.iterations_run = config.iterations;
  result.wall_time_seconds = seconds_since(start);
  return result;
}

double mesh_regularizer(const mesh::Mesh& current, const mesh::Mesh& original,
                        const mesh::PatchTopology& patch, double lambda_chamfer,
                        double lambda_laplacian, double lambda_edge, VertexMatrix* grad) {
  std::vector<int> rows;
  const mesh::Mesh sub = mesh::compact(mesh::with_topology(current, patch), &rows);
  const mesh::Mesh ref = mesh::compact(mesh::with_topology(original, patch));
  VertexMatrix g_sub = VertexMatrix::Zero(sub.positions.rows(), 3);
  double total = 0.0;
  VertexMatrix g;
  if (lambda_chamfer > 0.0) {
    total += lambda_chamfer * mesh::chamfer_distance(sub.positions, ref.positions, grad ? &g : nullptr);
    if (grad) g_sub += lambda_chamfer * g;
  }
  if (lambda_laplacian > 0.0) {
    total += lambda_laplacian * mesh::laplacian_loss(sub, false, grad ? &g : nullptr);
    if (grad) g_sub += lambda_laplacian * g;
  }
  if (lambda_edge > 0.0) {
    total += lambda_edge * mesh::edge_length_loss(sub, ref, grad ? &g : nullptr);
    if (grad) g_sub += lambda_edge * g;
  }
  if (grad) {
    *grad = VertexMatrix::Zero(current.positions.rows(), 3);
    for (std::size_t i = 0; i < rows.size(); ++i)
      grad->row(rows[i]) = g_sub.row(static_cast<Eigen::Index>(i));
  }
  return total;
}

namespace {

AttackResult mesh_space_attack(const char* method, const AttackConfig& config,
                               const recognition::EmbeddingModel& white_box,
                               const mesh::Mesh& base, const mesh::PatchTopology& patch,
                               const render::RenderParams& params,
                               const Image& attacker_image, const Image& target_image,
                               double l_chamfer, double l_laplacian, double l_edge) {
  const auto start = Clock::now();
  check_runnable(config);
  require(patch.face_count() > 0, ErrorCode::kEmptyPatch,
          std::string(method) + ": empty patch topology");
  require(l_chamfer >= 0.0 && l_laplacian >= 0.0 && l_edge >= 0.0,
          ErrorCode::kInvalidArgument, std::string(method) + ": lambdas must be >= 0");
  mesh::validate(base);
  const bool regularized = l_chamfer > 0.0 || l_laplacian > 0.0 || l_edge > 0.0;

  Scene scene;
  scene.model = &white_box;
  scene.patch = patch;
  scene.params = params;
  scene.attacker_image = attacker_image;
  scene.target_embedding = recognition::embed(white_box, target_image).vector;
  scene.mode = config.mode;

  const std::vector<int>& rows = patch.kept_vertices;
  const VectorX p0 = gather(base.positions, rows);
  const VectorX c0 = gather(base.colors, rows);
  VectorX p = p0, c = c0;
  AdamState sp(p.size()), sc(c.size());
  const double lr = config.effective_learning_rate();

  AttackResult result;
  result.method = method;
  result.initial_mesh = mesh::with_topology(base, patch);
  mesh::Mesh current = result.initial_mesh;

  auto objective = [&](bool grads, SceneEvaluation& ev) {
    ev = evaluate_scene(scene, current.positions, current.colors, grads);
    double total = ev.loss;
    if (regularized) {
      VertexMatrix g;
      total += mesh_regularizer(current, base, patch, l_chamfer, l_laplacian, l_edge,
                                grads ? &g : nullptr);
      if (grads) ev.d_positions += g;
    }
    return total;
  };

  for (int n = 0; n < config.iterations; ++n) {
    SceneEvaluation ev;
    const double total = objective(true, ev);
    check_finite(total, n, method, config);
    result.loss_trace.push_back(total);
    result.similarity_trace.push_back(ev.similarity);

    adam_step(sp, p, gather(ev.d_positions, rows), lr, config.adam);
    p = project_budget(p, p0, config.budget, BudgetSpace::kVertexUnits);
    adam_step(sc, c, gather(ev.d_colors, rows), lr, config.adam);
    c = project_budget(c, c0, config.budget, BudgetSpace::kColorUnits).cwiseMax(0.0).cwiseMin(255.0);
    scatter(p, rows, current.positions);
    scatter(c, rows, current.colors);
    result.budget_trace.push_back(
        std::max(budget_deviation(p, p0, BudgetSpace::kVertexUnits),
                 budget_deviation(c, c0, BudgetSpace::kColorUnits)));
  }

  SceneEvaluation ev;
  result.final_loss = objective(false, ev);
  check_finite(result.final_loss, config.iterations, method, config);
  result.final_similarity = ev.similarity;
  result.adversarial_image = ev.composite;
  if (config.iterations == 0) {
    result.initial_loss = result.final_loss;
  } else {
    mesh::Mesh keep = current;
    current = result.initial_mesh;
    SceneEvaluation ev0;
    result.initial_loss = objective(false, ev0);
    current = std::move(keep);
  }
  result.final_mesh = current;
  result.iterations_run = config.iterations;
  result.wall_time_seconds = seconds_since(start);
  return result;
}

}  // namespace

AttackResult at3d_m(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                    const mesh::Mesh& base_mesh, const mesh::PatchTopology& patch,
                    const render::RenderParams& params, const Image& attacker_image,
                    const Image& target_image) {
  return mesh_space_attack("AT3D-M", config, white_box, base_mesh, patch, params,
                           attacker_image, target_image, 0.0, 0.0, 0.0);
}

AttackResult at3d_ml(const AttackConfig& config, const recognition::EmbeddingModel& white_box,
                     const mesh::Mesh& base_mesh, const mesh::PatchTopology& patch,
                     const render::RenderParams& params, const Image& attacker_image,
                     const Image& target_image, double lambda_chamfer,
                     double lambda_laplacian, double lambda_edge) {
  return mesh_space_attack("AT3D-ML", config, white_box, base_mesh, patch, params,
                           attacker_image, target_image, lambda_chamfer, lambda_laplacian,
                           lambda_edge);
}

}  // namespace at3d::attack
