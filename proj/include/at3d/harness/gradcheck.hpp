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

#include <cstdint>
#include <string>
#include <vector>

#include "at3d/harness/finite_difference.hpp"

namespace at3d::harness {

enum class GradcheckScope { kMorphable, kRender, kRecognition, kEnd2End };

const char* scope_name(GradcheckScope scope);
GradcheckScope parse_scope(const std::string& name);  // morphable, render, recognition, end2end
double scope_tolerance(GradcheckScope scope);

struct GradcheckGroup {
  std::string name;  // parameter group, e.g. "alpha" or "positions"
  FiniteDifferenceReport fd;
  double tolerance = 0.0;
  bool passed() const { return fd.checked > 0 && fd.max_relative_error < tolerance; }
};

struct GradcheckReport {
  GradcheckScope scope = GradcheckScope::kMorphable;
  std::uint64_t seed = 0;
  std::vector<GradcheckGroup> groups;
  double seconds = 0.0;

  bool passed() const;
  double max_relative_error() const;
  std::string to_json() const;
};

// Finite-difference suite for one scope on a grid-resolution-16 model and
// 32x32 renders. Render-dependent scopes skip probes whose face coverage
// differs from the unperturbed render.
GradcheckReport run_gradcheck(GradcheckScope scope, std::uint64_t seed);

}  // namespace at3d::harness
