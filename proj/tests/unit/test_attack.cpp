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

#include <doctest.h>

#include <set>

#include "at3d/attack/adam.hpp"
#include "at3d/attack/baselines_2d.hpp"
#include "at3d/attack/config.hpp"
#include "at3d/attack/eot.hpp"
#include "at3d/attack/evaluation.hpp"
#include "at3d/core/error.hpp"
#include "at3d/mesh/regularizers.hpp"
#include "at3d/recognition/verification.hpp"
#include "../common/small_scene.hpp"
#include "nlohmann/json.hpp"
#include "../common/test_support.hpp"

using namespace at3d;
using namespace at3d::testing;
using attack::AttackConfig;
using attack::AttackMode;
using attack::InitStrategy;

namespace {

AttackConfig short_config(int iterations) {
  AttackConfig c;
  c.mode = AttackMode::kImpersonate;
  c.iterations = iterations;
  c.budget = 3.0;
  c.learning_rate = 0.015;
  c.seed = 5;
  return c;
}

const PairScene& scene_101_201() {
  static const PairScene s = make_pair_scene(small_context(), 101, 201, short_config(1));
  return s;
}

double mean_edge_length_deviation(const mesh::Mesh& a, const mesh::Mesh& b) {
  const auto edges = mesh::unique_edges(a.faces);
  double s = 0.0;
  for (const auto& [i, j] : edges) {
    const double la = (a.positions.row(i) - a.positions.row(j)).norm();
    const double lb = (b.positions.row(i) - b.positions.row(j)).norm();
    s += std::abs(la - lb) / lb;
  }
  return s / edges.size();
}

}  // namespace

TEST_CASE("adam: hand-evaluated steps") {
  attack::AdamState st(1);
  VectorX w = VectorX::Zero(1), g = VectorX::Ones(1);
  attack::adam_step(st, w, g, 0.015);
  CHECK(w(0) == doctest::Approx(-0.015 / (1.0 + 1e-8)).epsilon(1e-14));
  CHECK(st.step == 1);

  // Independent recurrence for three steps with varying gradients.
  attack::AdamState s3(2);
  VectorX p(2), m = VectorX::Zero(2), v = VectorX::Zero(2), q(2);
  p << 0.5, -1.0;
  q = p;
  const double grads[3][2] = {{0.3, -2.0}, {-0.1, 1.5}, {0.7, 0.0}};
  for (int t = 1; t <= 3; ++t) {
    VectorX gr(2);
    gr << grads[t - 1][0], grads[t - 1][1];
    attack::adam_step(s3, p, gr, 0.1);
    for (int i = 0; i < 2; ++i) {
      m(i) = 0.9 * m(i) + 0.1 * gr(i);
      v(i) = 0.999 * v(i) + 0.001 * gr(i) * gr(i);
      const double mh = m(i) / (1 - std::pow(0.9, t)), vh = v(i) / (1 - std::pow(0.999, t));
      q(i) -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  CHECK((p - q).cwiseAbs().maxCoeff() < 1e-15);

  attack::AdamState z(3);
  VectorX x = VectorX::Constant(3, 2.0);
  attack::adam_step(z, x, VectorX::Zero(3), 0.1);
  CHECK(x == VectorX::Constant(3, 2.0));
  CHECK(z.first_moment.isZero(0.0));
  CHECK(z.second_moment.isZero(0.0));

  attack::AdamState sq(1);
  VectorX w2 = VectorX::Ones(1);
  for (int i = 0; i < 100; ++i) attack::adam_step(sq, w2, 2.0 * w2, 0.05);
  CHECK(std::abs(w2(0)) < 0.1);

  CHECK_THROWS_AS(attack::adam_step(sq, w2, VectorX::Ones(2), 0.1), Error);
}

TEST_CASE("budget projection") {
  Rng rng(3);
  const VectorX ref = random_vector(50, rng, -5, 5);
  CHECK(attack::project_budget(ref, ref, 3.0, attack::BudgetSpace::kVertexUnits) == ref);
  VectorX cur = ref;
  cur(7) += 6.0;
  const VectorX p = attack::project_budget(cur, ref, 3.0, attack::BudgetSpace::kVertexUnits);
  CHECK(p(7) - ref(7) == doctest::Approx(3.0).epsilon(1e-15));

  const VectorX c = random_vector(50, rng, -20, 20);
  const VectorX std = random_vector(50, rng, 0.5, 4.0);
  const VectorX pn = attack::project_budget(c, ref, 2.0, attack::BudgetSpace::kCoeffNormalized, &std);
  const VectorX pv = attack::project_budget(c, ref, 2.0, attack::BudgetSpace::kColorUnits);
  for (int i = 0; i < 50; ++i) {
    double d = (c(i) - ref(i)) / std(i);
    d = d > 2.0 ? 2.0 : (d < -2.0 ? -2.0 : d);
    CHECK(pn(i) == doctest::Approx(ref(i) + d * std(i)).epsilon(1e-14));
    double e = c(i) - ref(i);
    e = e > 2.0 ? 2.0 : (e < -2.0 ? -2.0 : e);
    CHECK(pv(i) == doctest::Approx(ref(i) + e).epsilon(1e-14));
  }
  CHECK(attack::budget_deviation(pn, ref, attack::BudgetSpace::kCoeffNormalized, &std) <= 2.0 + 1e-12);
  CHECK_THROWS_AS(attack::project_budget(c, ref, 2.0, attack::BudgetSpace::kCoeffNormalized), Error);
}

TEST_CASE("attack config validation and JSON") {
  AttackConfig c;
  CHECK(c.effective_learning_rate() == doctest::Approx(1.5 * 3.0 / 300.0));
  CHECK(c.effective_learning_rate() == doctest::Approx(0.015));
  CHECK_NOTHROW(attack::validate(c));
  c.iterations = 0;
  CHECK_THROWS_AS(attack::validate(c), Error);
  c = AttackConfig{};
  c.budget = 0.0;
  CHECK_THROWS_AS(attack::validate(c), Error);
  c = AttackConfig{};
  c.lambda_edge = -1.0;
  CHECK_THROWS_AS(attack::validate(c), Error);

  c = AttackConfig{};
  c.init_strategy = {InitStrategy::kNoise, InitStrategy::kAttacker};
  c.mode = AttackMode::kDodge;
  const auto back = attack::config_from_json(attack::to_json(c), "config");
  CHECK(back.init_strategy.shape == InitStrategy::kNoise);
  CHECK(back.init_strategy.texture == InitStrategy::kAttacker);
  CHECK(back.mode == AttackMode::kDodge);
  auto j = attack::to_json(c);
  j["unknown_field"] = 1;
  try {
    attack::config_from_json(j, "config");
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(std::string(e.what()).find("unknown_field") != std::string::npos);
  }
}

TEST_CASE("initialization strategies") {
  const auto& ctx = small_context();
  const auto a = harness::identity_coefficients(ctx, 101);
  auto b = harness::identity_coefficients(ctx, 201);
  b.pose(1) = 0.05;
  b.gamma(1) = 0.2;
  const auto& m = ctx.morphable;

  const auto av = attack::init_coefficients({InitStrategy::kAVictim, InitStrategy::kAVictim}, a, b, m, 1);
  CHECK(av.alpha == b.alpha);
  CHECK(av.beta == b.beta);
  CHECK(av.tau == b.tau);
  CHECK(av.gamma == a.gamma);
  CHECK(av.pose == a.pose);

  const auto vv = attack::init_coefficients({InitStrategy::kVictim, InitStrategy::kVictim}, a, b, m, 1);
  CHECK(vv == b);

  const auto aa = attack::init_coefficients({InitStrategy::kAttacker, InitStrategy::kAttacker}, a, b, m, 1);
  CHECK(aa == a);

  const auto mixed = attack::init_coefficients({InitStrategy::kAVictim, InitStrategy::kAttacker}, a, b, m, 1);
  CHECK(mixed.alpha == b.alpha);
  CHECK(mixed.tau == a.tau);

  const auto n1 = attack::init_coefficients({InitStrategy::kNoise, InitStrategy::kNoise}, a, b, m, 9);
  const auto n2 = attack::init_coefficients({InitStrategy::kNoise, InitStrategy::kNoise}, a, b, m, 9);
  const auto n3 = attack::init_coefficients({InitStrategy::kNoise, InitStrategy::kNoise}, a, b, m, 10);
  CHECK(n1 == n2);
  CHECK(n1.alpha != n3.alpha);
  CHECK(n1.alpha != a.alpha);
  CHECK(n1.pose == a.pose);
}

TEST_CASE("attack loss") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  const auto& net = ctx.models[0];
  auto self = attack::attack_loss(net, s.x_b, s.x_b, AttackMode::kImpersonate);
  CHECK(self.loss == doctest::Approx(-1.0).epsilon(1e-12));
  self = attack::attack_loss(net, s.x_b, s.x_b, AttackMode::kDodge);
  CHECK(self.loss == doctest::Approx(1.0).epsilon(1e-12));

  const auto l = attack::attack_loss(net, s.x_a, s.x_b, AttackMode::kImpersonate);
  Rng rng(4);
  Image dir(32, 32);
  for (auto& d : dir.data) d = rng.uniform(-1, 1);
  auto f = [&](double t) {
    Image x = s.x_a;
    for (std::size_t i = 0; i < x.size(); ++i) x.data[i] += t * dir.data[i];
    return attack::attack_loss(net, x, s.x_b, AttackMode::kImpersonate).loss;
  };
  double analytic = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) analytic += l.gradient.data[i] * dir.data[i];
  CHECK(analytic == doctest::Approx((f(0.1) - f(-0.1)) / 0.2).epsilon(1e-3));
}

TEST_CASE("AT3D-P follows the sequential block schedule") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  const AttackConfig cfg = short_config(4);
  std::vector<attack::SubUpdateEvent> raw;
  struct Snapshot {
    int iteration;
    attack::CoefficientBlock block;
    morphable::Coefficients before, after;
  };
  std::vector<Snapshot> events;
  const auto r = attack::at3d_p(cfg, s.inputs, [&](const attack::SubUpdateEvent& e) {
    events.push_back({e.iteration, e.block, e.before, e.after});
  });
  REQUIRE(events.size() == 12);
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    CHECK(e.iteration == static_cast<int>(k / 3));
    CHECK(static_cast<int>(e.block) == static_cast<int>(k % 3));
    // Each sub-update consumes the previous one's output.
    if (k > 0) CHECK(e.before == events[k - 1].after);
    else CHECK(e.before == s.init);
    // Only its own block moves; illumination and pose never do.
    CHECK(e.after.gamma == s.init.gamma);
    CHECK(e.after.pose == s.init.pose);
    switch (e.block) {
      case attack::CoefficientBlock::kAlpha:
        CHECK(e.after.beta == e.before.beta);
        CHECK(e.after.tau == e.before.tau);
        CHECK(e.after.alpha != e.before.alpha);
        break;
      case attack::CoefficientBlock::kBeta:
        CHECK(e.after.alpha == e.before.alpha);
        CHECK(e.after.tau == e.before.tau);
        CHECK(e.after.beta != e.before.beta);
        break;
      case attack::CoefficientBlock::kTau:
        CHECK(e.after.alpha == e.before.alpha);
        CHECK(e.after.beta == e.before.beta);
        break;
    }
  }
  CHECK(r.loss_trace.size() == 4);
  CHECK(r.similarity_trace.size() == 4);
  CHECK(r.budget_trace.size() == 4);
  CHECK(*r.final_coefficients == events.back().after);
  // The first step moves every coordinate by about lr in normalized units.
  const VectorX dz = (events[0].after.alpha - s.init.alpha).cwiseQuotient(ctx.morphable.std_id);
  CHECK(dz.cwiseAbs().maxCoeff() <= 0.015 + 1e-12);
}

TEST_CASE("AT3D-P is deterministic and respects the budget") {
  const auto& s = scene_101_201();
  AttackConfig cfg = short_config(6);
  cfg.budget = 0.05;
  cfg.learning_rate = 0.03;
  const auto r1 = attack::at3d_p(cfg, s.inputs);
  const auto r2 = attack::at3d_p(cfg, s.inputs);
  CHECK(r1.loss_trace == r2.loss_trace);
  CHECK(r1.adversarial_image.data == r2.adversarial_image.data);
  for (double d : r1.budget_trace) CHECK(d <= 0.05 + 1e-12);
  CHECK(r1.budget_trace.back() == doctest::Approx(0.05));
}

TEST_CASE("zero iterations is the identity for every method") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  const AttackConfig cfg = short_config(0);
  const auto p = attack::at3d_p(cfg, s.inputs);
  CHECK(*p.final_coefficients == s.init);
  CHECK(p.final_mesh.positions == p.initial_mesh.positions);
  CHECK(p.loss_trace.empty());
  CHECK(p.final_loss == p.initial_loss);

  const auto m = attack::at3d_m(cfg, ctx.models[0], s.base, ctx.patch, s.params, s.x_a, s.x_b);
  CHECK(m.final_mesh.positions == s.base.positions);
  CHECK(m.final_mesh.colors == s.base.colors);
  const auto ml = attack::at3d_ml(cfg, ctx.models[0], s.base, ctx.patch, s.params, s.x_a, s.x_b, 1, 1, 1);
  CHECK(ml.final_mesh.positions == s.base.positions);

  AttackConfig c2 = cfg;
  const auto mim = attack::mim_2d(c2, ctx.models[0], s.x_a, s.x_b, s.patch_mask);
  CHECK(mim.adversarial_image.data == s.x_a.data);
  const auto eot = attack::eot_2d(c2, ctx.models[0], s.x_a, s.x_b, s.patch_mask, {}, 0.1);
  CHECK(eot.adversarial_image.data == s.x_a.data);
}

TEST_CASE("AT3D-M with a zero budget leaves the mesh unchanged") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  AttackConfig cfg = short_config(5);
  cfg.budget = 0.0;
  const auto m = attack::at3d_m(cfg, ctx.models[0], s.base, ctx.patch, s.params, s.x_a, s.x_b);
  CHECK(m.final_mesh.positions == s.base.positions);
  CHECK(m.final_mesh.colors == s.base.colors);
  for (double l : m.loss_trace) CHECK(l == m.loss_trace.front());
}

TEST_CASE("AT3D-ML with zero weights reproduces AT3D-M") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  const AttackConfig cfg = short_config(8);
  const auto m = attack::at3d_m(cfg, ctx.models[0], s.base, ctx.patch, s.params, s.x_a, s.x_b);
  const auto ml = attack::at3d_ml(cfg, ctx.models[0], s.base, ctx.patch, s.params, s.x_a, s.x_b, 0, 0, 0);
  CHECK(ml.loss_trace == m.loss_trace);
  CHECK(ml.final_mesh.positions == m.final_mesh.positions);
  for (double d : m.budget_trace) CHECK(d <= 3.0 + 1e-12);
}

TEST_CASE("AT3D-ML with a dominant edge term preserves edge lengths") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  AttackConfig cfg = short_config(40);
  const auto m = attack::at3d_m(cfg, ctx.models[0], s.base, ctx.patch, s.params, s.x_a, s.x_b);
  const auto ml = attack::at3d_ml(cfg, ctx.models[0], s.base, ctx.patch, s.params, s.x_a, s.x_b, 0, 0, 1e3);
  const double dev_ml = mean_edge_length_deviation(ml.final_mesh, ml.initial_mesh);
  CHECK(dev_ml < 0.01);
  CHECK(dev_ml < mean_edge_length_deviation(m.final_mesh, m.initial_mesh));
}

TEST_CASE("mesh regularizer gradient") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  Rng rng(21);
  mesh::Mesh moved = mesh::with_topology(s.base, ctx.patch);
  for (int v : ctx.patch.kept_vertices)
    for (int d = 0; d < 3; ++d) moved.positions(v, d) += rng.uniform(-1.5, 1.5);
  VertexMatrix g;
  attack::mesh_regularizer(moved, s.base, ctx.patch, 0.7, 0.3, 1.1, &g);
  const auto fd = fd_scalar(
      [&](const VectorX& x) {
        mesh::Mesh t = moved;
        flatten(t.positions) = x;
        return attack::mesh_regularizer(t, s.base, ctx.patch, 0.7, 0.3, 1.1, nullptr);
      },
      flatten(moved.positions), flatten(g), 1e-5);
  CHECK(fd.max_relative_error < 1e-4);
}

TEST_CASE("2D-MIM stays inside the mask and the budget") {
  const auto& ctx = small_context();
  const auto& s = scene_101_201();
  AttackConfig cfg = short_config(40);
  cfg.step_size = 1.5;
  cfg.epsilon = 4.0;
  const auto r = attack::mim_2d(cfg, ctx.models[0], s.x_a, s.x_b, s.patch_mask);
  int moved = 0;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      for (int ch = 0; ch < 3; ++ch) {
        const double d = r.adversarial_image.at(x, y, ch) - s.x_a.at(x, y, ch);
        if (s.patch_mask.at(x, y)) {
          CHECK(std::abs(d) <= 4.0 + 1e-12);
          moved += d != 0.0;
        } else {
          CHECK(d == 0.0);
        }
        CHECK(r.adversarial_image.at(x, y, ch) >= 0.0);
        CHECK(r.adversarial_image.at(x, y, ch) <= 255.0);
      }
  CHECK(moved > 0);
  CHECK(r.final_loss < r.initial_loss);
  for (double b : r.budget_trace) CHECK(b <= 4.0 + 1e-12);

  const auto none = attack::mim_2d(cfg, ctx.models[0], s.x_a, s.x_b, Mask(32, 32, 0));
  CHECK(none.adversarial_image.data == s.x_a.data);
}

TEST_CASE("EOT estimator reductions") {
  Rng rng(1);
  const VectorX base = random_vector(5, rng);
  int calls = 0;
  attack::GradientFn inner = [&](const attack::EotTransform& t) {
    ++calls;
    VectorX g = base * t.brightness;
    g(0) += t.rotation.z();
    g(1) += t.translation.x();
    return g;
  };
  Rng r1(3);
  const auto zero = attack::eot_wrap(inner, attack::EotDistribution::zero_width(), 1);
  CHECK(zero(r1) == inner(attack::EotTransform{}));

  // k = 2: exactly the mean of the two draws taken from the same stream.
  const attack::EotDistribution dist;
  Rng a(17), b(17);
  const VectorX got = attack::eot_wrap(inner, dist, 2)(a);
  const auto t1 = dist.sample(b);
  const auto t2 = dist.sample(b);
  CHECK(got == (inner(t1) + inner(t2)) / 2.0);
  CHECK(calls > 0);

  // Variance of the estimator scales like 1/k.
  auto variance = [&](int k) {
    Rng r(99);
    const auto est = attack::eot_wrap(inner, dist, k);
    std::vector<double> xs;
    for (int i = 0; i < 4000; ++i) xs.push_back(est(r)(0));
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / (xs.size() - 1);
  };
  const double ratio = variance(1) / variance(4);
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
  CHECK_THROWS_AS(attack::eot_wrap(inner, dist, 0), Error);
}

TEST_CASE("image warp adjoint") {
  Rng rng(5);
  Image x(24, 20), y(24, 20);
  for (auto& v : x.data) v = rng.uniform(0, 255);
  for (auto& v : y.data) v = rng.uniform(-1, 1);
  attack::EotTransform t;
  t.rotation.z() = 0.07;
  t.translation << 0.9, -1.3, 0.0;
  t.brightness = 1.08;
  const Image wx = attack::warp_image(x, t, 1.7);
  const Image aty = attack::warp_image_adjoint(y, t, 1.7);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lhs += wx.data[i] * y.data[i];
    rhs += x.data[i] * aty.data[i];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(attack::warp_image(x, attack::EotTransform{}, 1.7).data == x.data);
}

TEST_CASE("success evaluation matches a hand recount") {
  const auto& ctx = small_context();
  const auto models = ctx.evaluated();
  std::vector<attack::MethodOutcomes> results(2);
  results[0].method = "identity";
  results[1].method = "unmodified";
  for (std::uint64_t i = 0; i < 6; ++i) {
    const auto a = harness::identity_coefficients(ctx, 300 + i);
    const auto b = harness::identity_coefficients(ctx, 400 + i);
    const Image xa = harness::render_face(ctx, a), xb = harness::render_face(ctx, b);
    results[0].pairs.push_back({xb, xb, xa});
    results[1].pairs.push_back({xa, xb, xa});
  }
  const auto table = attack::eval_attack(results, models, AttackMode::kImpersonate);
  for (std::size_t k = 0; k < models.size(); ++k) {
    CHECK(table.percent[0][k] == 100.0);
    for (std::size_t m = 0; m < 2; ++m) {
      int hits = 0;
      for (const auto& p : results[m].pairs)
        hits += recognition::verify(*models[k].model, p.adversarial, p.target, models[k].delta);
      CHECK(table.percent[m][k] == doctest::Approx(100.0 * hits / 6));
      CHECK(table.counted[m][k] == 6);
    }
  }
  CHECK(table.at("identity", models[0].name) == 100.0);
}
