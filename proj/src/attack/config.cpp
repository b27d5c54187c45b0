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

#include "at3d/attack/config.hpp"

#include <cmath>
#include <set>

#include "at3d/core/error.hpp"

namespace at3d::attack {

using nlohmann::json;

const char* mode_name(AttackMode mode) {
  return mode == AttackMode::kDodge ? "Dodge" : "Impersonate";
}

AttackMode parse_mode(const std::string& name) {
  if (name == "Dodge") return AttackMode::kDodge;
  if (name == "Impersonate") return AttackMode::kImpersonate;
  fail(ErrorCode::kValidation, "unknown attack mode '" + name +
                                   "' (expected Dodge or Impersonate)");
}

const char* strategy_name(InitStrategy s) {
  switch (s) {
    case InitStrategy::kNoise: return "Noise";
    case InitStrategy::kAttacker: return "Attacker";
    case InitStrategy::kVictim: return "Victim";
    case InitStrategy::kAVictim: return "AVictim";
  }
  return "AVictim";
}

InitStrategy parse_strategy(const std::string& name) {
  if (name == "Noise") return InitStrategy::kNoise;
  if (name == "Attacker") return InitStrategy::kAttacker;
  if (name == "Victim") return InitStrategy::kVictim;
  if (name == "AVictim") return InitStrategy::kAVictim;
  fail(ErrorCode::kValidation, "unknown init strategy '" + name +
                                   "' (expected Noise, Attacker, Victim, AVictim)");
}

double AttackConfig::effective_learning_rate() const {
  if (learning_rate) return *learning_rate;
  return iterations > 0 ? 1.5 * budget / iterations : 0.0;
}

void validate(const AttackConfig& c) {
  auto check = [](bool ok, const std::string& what) {
    require(ok, ErrorCode::kValidation, "config." + what);
  };
  check(c.iterations >= 1, "iterations: must be >= 1");
  check(std::isfinite(c.budget) && c.budget > 0.0, "budget: must be > 0");
  const double lr = c.effective_learning_rate();
  check(std::isfinite(lr) && lr > 0.0, "learning_rate: must be > 0");
  check(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0, "adam.beta1: must lie in [0, 1)");
  check(c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0, "adam.beta2: must lie in [0, 1)");
  check(c.adam.epsilon > 0.0, "adam.epsilon: must be > 0");
  check(c.lambda_chamfer >= 0.0 && c.lambda_laplacian >= 0.0 && c.lambda_edge >= 0.0,
        "lambda_*: must be >= 0");
  check(c.step_size > 0.0, "step_size: must be > 0");
  check(c.decay >= 0.0, "decay: must be >= 0");
  check(c.epsilon >= 0.0, "epsilon: must be >= 0");
  check(c.eot_samples >= 1, "eot_samples: must be >= 1");
  check(c.patch_region != mesh::Region::kCustom, "patch_region: must be a named region");
}

json to_json(const AttackConfig& c) {
  json j;
  j["mode"] = mode_name(c.mode);
  j["iterations"] = c.iterations;
  j["budget"] = c.budget;
  j["learning_rate"] = c.effective_learning_rate();
  j["init_strategy"] = {{"shape", strategy_name(c.init_strategy.shape)},
                        {"texture", strategy_name(c.init_strategy.texture)}};
  j["patch_region"] = mesh::region_name(c.patch_region);
  j["adam"] = {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}};
  j["seed"] = c.seed;
  j["lambda_chamfer"] = c.lambda_chamfer;
  j["lambda_laplacian"] = c.lambda_laplacian;
  j["lambda_edge"] = c.lambda_edge;
  j["step_size"] = c.step_size;
  j["decay"] = c.decay;
  j["epsilon"] = c.epsilon;
  j["eot_samples"] = c.eot_samples;
  return j;
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  fail(ErrorCode::kValidation, path + ": " + msg);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

template <class F>
auto parse_with(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

}  // namespace

AttackConfig config_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  static const std::set<std::string> known = {
      "mode", "iterations", "budget", "learning_rate", "init_strategy", "patch_region",
      "adam", "seed", "lambda_chamfer", "lambda_laplacian", "lambda_edge", "step_size",
      "decay", "epsilon", "eot_samples"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) bad(where + "." + key, "unknown field");

  AttackConfig c;
  const auto p = [&](const char* k) { return where + "." + k; };
  if (j.contains("mode"))
    c.mode = parse_with(p("mode"), [&] { return parse_mode(get_string(j["mode"], p("mode"))); });
  if (j.contains("iterations")) {
    const auto& v = j["iterations"];
    if (!v.is_number_integer()) bad(p("iterations"), "expected an integer");
    c.iterations = v.get<int>();
  }
  if (j.contains("budget")) c.budget = get_number(j["budget"], p("budget"));
  if (j.contains("learning_rate") && !j["learning_rate"].is_null())
    c.learning_rate = get_number(j["learning_rate"], p("learning_rate"));
  if (j.contains("init_strategy")) {
    const auto& s = j["init_strategy"];
    const std::string sp = p("init_strategy");
    if (!s.is_object()) bad(sp, "expected an object with shape and texture");
    for (const auto& [key, value] : s.items())
      if (key != "shape" && key != "texture") bad(sp + "." + key, "unknown field");
    if (s.contains("shape"))
      c.init_strategy.shape = parse_with(sp + ".shape", [&] {
        return parse_strategy(get_string(s["shape"], sp + ".shape"));
      });
    if (s.contains("texture"))
      c.init_strategy.texture = parse_with(sp + ".texture", [&] {
        return parse_strategy(get_string(s["texture"], sp + ".texture"));
      });
  }
  if (j.contains("patch_region"))
    c.patch_region = parse_with(p("patch_region"), [&] {
      return mesh::parse_region(get_string(j["patch_region"], p("patch_region")));
    });
  if (j.contains("adam")) {
    const auto& a = j["adam"];
    const std::string ap = p("adam");
    if (!a.is_object()) bad(ap, "expected an object");
    for (const auto& [key, value] : a.items()) {
      if (key == "beta1") c.adam.beta1 = get_number(value, ap + ".beta1");
      else if (key == "beta2") c.adam.beta2 = get_number(value, ap + ".beta2");
      else if (key == "epsilon") c.adam.epsilon = get_number(value, ap + ".epsilon");
      else bad(ap + "." + key, "unknown field");
    }
  }
  if (j.contains("seed")) {
    const auto& v = j["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      bad(p("seed"), "expected a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  if (j.contains("lambda_chamfer")) c.lambda_chamfer = get_number(j["lambda_chamfer"], p("lambda_chamfer"));
  if (j.contains("lambda_laplacian")) c.lambda_laplacian = get_number(j["lambda_laplacian"], p("lambda_laplacian"));
  if (j.contains("lambda_edge")) c.lambda_edge = get_number(j["lambda_edge"], p("lambda_edge"));
  if (j.contains("step_size")) c.step_size = get_number(j["step_size"], p("step_size"));
  if (j.contains("decay")) c.decay = get_number(j["decay"], p("decay"));
  if (j.contains("epsilon")) c.epsilon = get_number(j["epsilon"], p("epsilon"));
  if (j.contains("eot_samples")) {
    const auto& v = j["eot_samples"];
    if (!v.is_number_integer()) bad(p("eot_samples"), "expected an integer");
    c.eot_samples = v.get<int>();
  }
  try {
    validate(c);
  } catch (const Error& e) {
    // validate() reports "config.<field>"; re-anchor at the caller's path.
    std::string msg = e.what();
    if (msg.rfind("config.", 0) == 0) msg = where + msg.substr(6);
    fail(ErrorCode::kValidation, msg);
  }
  return c;
}

}  // namespace at3d::attack
