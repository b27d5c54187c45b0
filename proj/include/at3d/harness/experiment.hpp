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

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "at3d/attack/evaluation.hpp"
#include "at3d/harness/experiment_spec.hpp"
#include "at3d/morphable/morphable_model.hpp"
#include "at3d/recognition/verification.hpp"

namespace at3d::harness {

// Models, thresholds and rendering setup shared by every pair of a run.
struct ExperimentContext {
  morphable::MorphableModel morphable;
  mesh::PatchTopology patch;
  render::RenderParams camera;
  VectorX illumination;
  double grid_spacing = 0.0;
  std::vector<ModelSpec> model_specs;  // white box first
  std::vector<recognition::EmbeddingModel> models;
  std::vector<recognition::VerificationThreshold> thresholds;

  std::vector<attack::EvaluatedModel> evaluated() const;
};

inline constexpr double kBackgroundLevel = 100.0;

ExperimentContext prepare_context(const ExperimentSpec& spec);

// Identity drawn from the morphable model with the experiment illumination.
morphable::Coefficients identity_coefficients(const ExperimentContext& ctx, std::uint64_t seed);
// Full face composited over a uniform background.
Image render_face(const ExperimentContext& ctx, const morphable::Coefficients& c);
// The same identity under a small random change of expression, head rotation and
// light level, still aligned (no translation).
morphable::Coefficients jitter(const ExperimentContext& ctx, const morphable::Coefficients& c,
                               std::uint64_t seed);

struct CurvaturePoint {
  double radius = 0.0;
  double original = 0.0;
  double adversarial = 0.0;
};

struct PairRecord {
  int pair_index = 0;
  PairSpec pair;
  std::string method;
  bool ok = false;
  std::string error;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_similarity = 0.0;
  int iterations = 0;
  double wall_time_seconds = 0.0;
  std::map<std::string, bool> success;  // model name -> verified success
  std::map<std::string, bool> counted;  // model name -> pair in denominator
  std::vector<CurvaturePoint> curvature;
  std::map<std::string, std::string> artifacts;  // kind -> path
};

struct CurvatureSummary {
  std::string method;
  std::vector<CurvaturePoint> points;  // means over successful pairs
};

struct ExperimentReport {
  attack::SuccessTable table;
  std::vector<CurvatureSummary> curvature;
  std::vector<PairRecord> records;
  std::vector<std::pair<std::string, recognition::VerificationThreshold>> thresholds;
  nlohmann::json spec;
  nlohmann::json stamp;
  double elapsed_seconds = 0.0;
  std::string report_path;

  nlohmann::json to_json() const;
};

struct RunOptions {
  int threads = 1;
  std::optional<std::string> output_dir;  // overrides ExperimentSpec::output_dir
  bool write_artifacts = true;
  std::function<void(const std::string&)> log;
};

// Runs every (pair x method), evaluates on all models and writes the report
// plus per-pair artifacts. A failing pair is recorded and the batch goes on.
ExperimentReport run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

// Table recomputed from the per-pair records of a report JSON.
attack::SuccessTable recount_table(const nlohmann::json& report);
// True when the recount equals the stored table exactly.
bool report_consistent(const nlohmann::json& report, std::string* why = nullptr);

}  // namespace at3d::harness
