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

#include "at3d/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "at3d/attack/attacks.hpp"
#include "at3d/attack/baselines_2d.hpp"
#include "at3d/core/error.hpp"
#include "at3d/core/rng.hpp"
#include "at3d/mesh/curvature.hpp"
#include "at3d/mesh/obj_io.hpp"
#include "at3d/render/image_io.hpp"
#include "at3d/render/rasterizer.hpp"

namespace at3d::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

mesh::Mesh canonical_mesh(const morphable::MorphableModel& m) {
  mesh::Mesh c;
  c.positions = m.mean_shape;
  c.colors = m.mean_texture;
  c.faces = m.faces;
  return c;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ? ch : '_';
  return out;
}

void write_trace(const attack::AttackResult& r, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path);
  out << "iteration,loss,white_box_similarity\n";
  char line[96];
  for (std::size_t i = 0; i < r.loss_trace.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i, r.loss_trace[i],
                  r.similarity_trace[i]);
    out << line;
  }
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + path);
}

bool is_mesh_method(const std::string& kind) { return kind.rfind("AT3D", 0) == 0; }

}  // namespace

std::vector<attack::EvaluatedModel> ExperimentContext::evaluated() const {
  std::vector<attack::EvaluatedModel> out;
  for (std::size_t i = 0; i < models.size(); ++i)
    out.push_back({model_specs[i].name(), &models[i], thresholds[i].delta});
  return out;
}

morphable::Coefficients identity_coefficients(const ExperimentContext& ctx, std::uint64_t seed) {
  morphable::Coefficients c = morphable::sample_identity(ctx.morphable, seed);
  c.gamma = ctx.illumination;
  return c;
}

Image render_face(const ExperimentContext& ctx, const morphable::Coefficients& c) {
  static thread_local const morphable::MorphableModel* cached_model = nullptr;
  static thread_local mesh::PatchTopology full;
  if (cached_model != &ctx.morphable || full.faces.rows() != ctx.morphable.faces.rows()) {
    full = mesh::full_topology(canonical_mesh(ctx.morphable));
    cached_model = &ctx.morphable;
  }
  const auto syn = morphable::synthesize(ctx.morphable, c);
  const render::RenderParams params = attack::params_for(ctx.camera, c);
  const auto r = render::rasterize(syn.positions, syn.colors, full, params);
  return render::composite(r, Image(params.width, params.height, kBackgroundLevel));
}

morphable::Coefficients jitter(const ExperimentContext& ctx, const morphable::Coefficients& c,
                               std::uint64_t seed) {
  Rng rng(seed);
  morphable::Coefficients out = c;
  for (Eigen::Index k = 0; k < out.beta.size(); ++k)
    out.beta[k] += rng.normal(0.0, 0.3 * ctx.morphable.std_exp[k]);
  // Faces are aligned: rotation changes, the face centre stays put.
  for (int k = 0; k < 3; ++k) out.pose[k] += rng.uniform(-0.03, 0.03);
  out.gamma[0] *= 1.0 + rng.uniform(-0.05, 0.05);
  return out;
}

ExperimentContext prepare_context(const ExperimentSpec& spec) {
  ExperimentContext ctx;
  ctx.morphable = morphable::generate_synthetic_model(spec.morphable_seed, spec.resolution);
  ctx.patch = mesh::extract_patch(canonical_mesh(ctx.morphable), spec.patch_region);
  ctx.camera = spec.render.camera();
  render::validate(ctx.camera);
  ctx.illumination = ctx.camera.illumination;
  ctx.grid_spacing = 2.0 * mesh::FaceFrame::kHalfWidth / (spec.resolution - 1);
  ctx.model_specs.push_back(spec.white_box);
  for (const auto& m : spec.black_box) ctx.model_specs.push_back(m);
  for (const auto& m : ctx.model_specs)
    ctx.models.push_back(recognition::build_toy_model(m.arch, m.seed, ctx.camera.width,
                                                      ctx.camera.height));

  // Calibration set: two jittered views per identity. Same pairs match the
  // views of one identity, different pairs match neighbouring identities.
  const int n = spec.calibration_pairs;
  const std::uint64_t stream = derive_seed(spec.seed, 0xCA11B);
  std::vector<Image> first, second;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed(stream, static_cast<std::uint64_t>(i));
    const auto c = identity_coefficients(ctx, s);
    first.push_back(render_face(ctx, jitter(ctx, c, derive_seed(s, 1))));
    second.push_back(render_face(ctx, jitter(ctx, c, derive_seed(s, 2))));
  }
  for (const auto& model : ctx.models) {
    std::vector<VectorX> ea, eb;
    for (int i = 0; i < n; ++i) {
      ea.push_back(recognition::embed(model, first[i]).vector);
      eb.push_back(recognition::embed(model, second[i]).vector);
    }
    std::vector<double> same, diff;
    for (int i = 0; i < n; ++i) {
      same.push_back(recognition::cosine_similarity(ea[i], eb[i]));
      diff.push_back(recognition::cosine_similarity(ea[i], eb[(i + 1) % n]));
    }
    ctx.thresholds.push_back(recognition::calibrate_from_scores(same, diff));
  }
  return ctx;
}

namespace {

struct Task {
  int pair_index;
  const MethodSpec* method;
};

PairRecord run_task(const ExperimentSpec& spec, const ExperimentContext& ctx, const Task& task,
                    const std::string& out_dir, bool write_artifacts) {
  const PairSpec& pair = spec.corpus[static_cast<std::size_t>(task.pair_index)];
  const MethodSpec& method = *task.method;
  PairRecord rec;
  rec.pair_index = task.pair_index;
  rec.pair = pair;
  rec.method = method.label;
  const auto models = ctx.evaluated();
  for (const auto& m : models) {
    rec.success[m.name] = false;
    rec.counted[m.name] = method.config.mode == attack::AttackMode::kImpersonate;
  }

  try {
    attack::AttackConfig cfg = method.config;
    cfg.seed = derive_seed(derive_seed(spec.seed, cfg.seed),
                           static_cast<std::uint64_t>(task.pair_index));
    const auto attacker = identity_coefficients(ctx, pair.attacker);
    const auto victim = identity_coefficients(ctx, pair.victim);
    const Image x_a = render_face(ctx, attacker);
    const Image x_b = cfg.mode == attack::AttackMode::kImpersonate
                          ? render_face(ctx, victim)
                          : render_face(ctx, jitter(ctx, attacker, derive_seed(pair.attacker, 0xD0D6E)));
    const mesh::PatchTopology patch =
        cfg.patch_region == spec.patch_region
            ? ctx.patch
            : mesh::extract_patch(canonical_mesh(ctx.morphable), cfg.patch_region);

    // Same initialization as at3d_p draws internally.
    const auto init = attack::init_coefficients(cfg.init_strategy, attacker, victim,
                                                ctx.morphable, derive_seed(cfg.seed, 0x1417));
    const render::RenderParams params = attack::params_for(ctx.camera, init);

    attack::AttackResult result;
    if (method.kind == "AT3D-P") {
      attack::At3dInputs in;
      in.morphable = &ctx.morphable;
      in.white_box = &ctx.models[0];
      in.patch = patch;
      in.camera = ctx.camera;
      in.attacker = {attacker, x_a};
      in.victim = {victim, x_b};
      in.target_image = x_b;
      result = attack::at3d_p(cfg, in);
    } else {
      const mesh::Mesh base = morphable::synthesize_mesh(ctx.morphable, init);
      if (method.kind == "AT3D-M") {
        result = attack::at3d_m(cfg, ctx.models[0], base, patch, params, x_a, x_b);
      } else if (method.kind == "AT3D-ML") {
        result = attack::at3d_ml(cfg, ctx.models[0], base, patch, params, x_a, x_b,
                                 cfg.lambda_chamfer, cfg.lambda_laplacian, cfg.lambda_edge);
      } else {
        const Mask mask = render::rasterize(base.positions, base.colors, patch, params).mask;
        if (method.kind == "2D-MIM") {
          result = attack::mim_2d(cfg, ctx.models[0], x_a, x_b, mask);
        } else {
          result = attack::eot_2d(cfg, ctx.models[0], x_a, x_b, mask, attack::EotDistribution{},
                                  ctx.camera.focal / morphable::kFrontalDistance);
        }
      }
    }

    const attack::PairOutcome outcome{result.adversarial_image, x_b, x_a};
    for (const auto& m : models) {
      rec.counted[m.name] = attack::counts_for(m, outcome, cfg.mode);
      rec.success[m.name] = attack::attack_succeeded(m, outcome, cfg.mode);
    }
    rec.initial_loss = result.initial_loss;
    rec.final_loss = result.final_loss;
    rec.final_similarity = result.final_similarity;
    rec.iterations = result.iterations_run;
    rec.wall_time_seconds = result.wall_time_seconds;

    mesh::Mesh original, adversarial;
    if (is_mesh_method(method.kind)) {
      original = mesh::compact(result.initial_mesh);
      adversarial = mesh::compact(result.final_mesh);
      for (double k : spec.curvature_radii) {
        const double r = k * ctx.grid_spacing;
        rec.curvature.push_back({r, mesh::average_curvature(original, r, true),
                                 mesh::average_curvature(adversarial, r, true)});
      }
    }

    if (write_artifacts) {
      const fs::path dir = fs::path(out_dir) / "pairs" /
                           (std::to_string(task.pair_index) + "_" + std::to_string(pair.attacker) +
                            "_" + std::to_string(pair.victim)) /
                           sanitize(method.label);
      fs::create_directories(dir);
      rec.artifacts["trace"] = (dir / "trace.csv").string();
      write_trace(result, rec.artifacts["trace"]);
      rec.artifacts["image"] = (dir / "adversarial.ppm").string();
      render::save_ppm(result.adversarial_image, rec.artifacts["image"]);
      if (is_mesh_method(method.kind)) {
        rec.artifacts["mesh"] = (dir / "adversarial.obj").string();
        mesh::save_obj(adversarial, rec.artifacts["mesh"]);
        rec.artifacts["original_mesh"] = (dir / "original.obj").string();
        mesh::save_obj(original, rec.artifacts["original_mesh"]);
      }
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    for (auto& [name, s] : rec.success) s = false;
  }
  return rec;
}

attack::SuccessTable table_from(const std::vector<std::string>& methods,
                                const std::vector<std::string>& models,
                                const std::vector<PairRecord>& records) {
  attack::SuccessTable t;
  t.methods = methods;
  t.models = models;
  for (const auto& method : methods) {
    std::vector<double> row;
    std::vector<int> counted;
    for (const auto& model : models) {
      int hits = 0, total = 0;
      for (const auto& r : records) {
        if (r.method != method) continue;
        const auto c = r.counted.find(model);
        if (c == r.counted.end() || !c->second) continue;
        ++total;
        const auto s = r.success.find(model);
        if (s != r.success.end() && s->second) ++hits;
      }
      row.push_back(total > 0 ? 100.0 * hits / total : 0.0);
      counted.push_back(total);
    }
    t.percent.push_back(row);
    t.counted.push_back(counted);
  }
  return t;
}

json record_json(const PairRecord& r) {
  json j;
  j["pair_index"] = r.pair_index;
  j["attacker"] = r.pair.attacker;
  j["victim"] = r.pair.victim;
  j["method"] = r.method;
  j["ok"] = r.ok;
  j["error"] = r.error;
  j["initial_loss"] = r.initial_loss;
  j["final_loss"] = r.final_loss;
  j["final_similarity"] = r.final_similarity;
  j["iterations"] = r.iterations;
  j["wall_time_seconds"] = r.wall_time_seconds;
  j["success"] = r.success;
  j["counted"] = r.counted;
  j["curvature"] = json::array();
  for (const auto& p : r.curvature)
    j["curvature"].push_back({{"radius", p.radius}, {"original", p.original},
                              {"adversarial", p.adversarial}});
  j["artifacts"] = r.artifacts;
  return j;
}

PairRecord record_from(const json& j) {
  PairRecord r;
  r.method = j.at("method").get<std::string>();
  r.success = j.at("success").get<std::map<std::string, bool>>();
  r.counted = j.at("counted").get<std::map<std::string, bool>>();
  return r;
}

json table_json(const attack::SuccessTable& t) {
  return {{"methods", t.methods}, {"models", t.models}, {"percent", t.percent},
          {"counted", t.counted}};
}

}  // namespace

json ExperimentReport::to_json() const {
  json j;
  j["table"] = table_json(table);
  j["thresholds"] = json::array();
  for (const auto& [name, t] : thresholds)
    j["thresholds"].push_back({{"model", name},
                               {"delta", t.delta},
                               {"accuracy", t.report.accuracy},
                               {"false_accept_rate", t.report.false_accept_rate},
                               {"false_reject_rate", t.report.false_reject_rate},
                               {"same_pairs", t.report.same_pairs},
                               {"diff_pairs", t.report.diff_pairs}});
  j["curvature"] = json::array();
  for (const auto& c : curvature) {
    json pts = json::array();
    for (const auto& p : c.points)
      pts.push_back({{"radius", p.radius}, {"original", p.original}, {"adversarial", p.adversarial}});
    j["curvature"].push_back({{"method", c.method}, {"points", pts}});
  }
  j["records"] = json::array();
  for (const auto& r : records) j["records"].push_back(record_json(r));
  j["spec"] = spec;
  j["stamp"] = stamp;
  j["elapsed_seconds"] = elapsed_seconds;
  return j;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  require(options.threads >= 1, ErrorCode::kInvalidArgument, "run_experiment: threads must be >= 1");
  const std::string out_dir = options.output_dir ? *options.output_dir : spec.output_dir;
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  log("preparing models and calibrating thresholds");
  const ExperimentContext ctx = prepare_context(spec);
  ExperimentReport report;
  for (std::size_t i = 0; i < ctx.models.size(); ++i) {
    report.thresholds.emplace_back(ctx.model_specs[i].name(), ctx.thresholds[i]);
    log("model " + ctx.model_specs[i].name() + ": delta " + std::to_string(ctx.thresholds[i].delta) +
        ", balanced accuracy " + std::to_string(ctx.thresholds[i].report.accuracy));
  }

  std::vector<Task> tasks;
  for (std::size_t m = 0; m < spec.methods.size(); ++m)
    for (std::size_t p = 0; p < spec.corpus.size(); ++p)
      tasks.push_back({static_cast<int>(p), &spec.methods[m]});
  std::vector<PairRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      records[i] = run_task(spec, ctx, tasks[i], out_dir, options.write_artifacts);
      std::lock_guard<std::mutex> lock(log_mutex);
      const auto& r = records[i];
      log(r.method + " pair " + std::to_string(r.pair_index) +
          (r.ok ? ": loss " + std::to_string(r.initial_loss) + " -> " + std::to_string(r.final_loss)
                : ": failed: " + r.error));
    }
  };
  const int threads = std::min<int>(options.threads, static_cast<int>(tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::string> methods, models;
  for (const auto& m : spec.methods) methods.push_back(m.label);
  for (const auto& m : ctx.model_specs) models.push_back(m.name());
  report.records = std::move(records);
  report.table = table_from(methods, models, report.records);

  for (const auto& m : spec.methods) {
    if (!is_mesh_method(m.kind)) continue;
    CurvatureSummary summary;
    summary.method = m.label;
    for (std::size_t k = 0; k < spec.curvature_radii.size(); ++k) {
      CurvaturePoint p;
      p.radius = spec.curvature_radii[k] * ctx.grid_spacing;
      int n = 0;
      for (const auto& r : report.records) {
        if (r.method != m.label || !r.ok || r.curvature.size() <= k) continue;
        p.original += r.curvature[k].original;
        p.adversarial += r.curvature[k].adversarial;
        ++n;
      }
      if (n > 0) {
        p.original /= n;
        p.adversarial /= n;
      }
      summary.points.push_back(p);
    }
    report.curvature.push_back(summary);
  }

  report.spec = to_json(spec);
  report.stamp = {{"version", kVersion}, {"compiler", __VERSION__}, {"threads", options.threads}};
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.write_artifacts) {
    fs::create_directories(out_dir);
    report.report_path = (fs::path(out_dir) / "report.json").string();
    std::ofstream out(report.report_path);
    require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + report.report_path);
    out << report.to_json().dump(2) << "\n";
    require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + report.report_path);
  }
  return report;
}

attack::SuccessTable recount_table(const json& report) {
  try {
    const auto& t = report.at("table");
    std::vector<PairRecord> records;
    for (const auto& r : report.at("records")) records.push_back(record_from(r));
    return table_from(t.at("methods").get<std::vector<std::string>>(),
                      t.at("models").get<std::vector<std::string>>(), records);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, std::string("report: ") + e.what());
  }
}

bool report_consistent(const json& report, std::string* why) {
  const attack::SuccessTable t = recount_table(report);
  const json stored = report.at("table");
  const json again = table_json(t);
  if (stored.at("percent") == again.at("percent") && stored.at("counted") == again.at("counted"))
    return true;
  if (why) *why = "stored table " + stored.dump() + " differs from recount " + again.dump();
  return false;
}

}  // namespace at3d::harness
