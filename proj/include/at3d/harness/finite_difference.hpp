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
#include <functional>
#include <optional>
#include <vector>

#include "at3d/core/types.hpp"

namespace at3d::harness {

inline constexpr int kMaxCheckedCoordinates = 500;

struct FiniteDifferenceReport {
  double max_relative_error = 0.0;
  int checked = 0;   // coordinates compared
  int skipped = 0;   // coordinates rejected by the probe (unstable)
  int worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

using ScalarFn = std::function<double(const VectorX&)>;
// A probe may decline a point (for example when the render coverage changed);
// the coordinate is then skipped.
using ProbeFn = std::function<std::optional<double>(const VectorX&)>;

// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h against `analytic`.
// Every coordinate is checked when there are at most 500; otherwise 500
// distinct coordinates drawn with `seed`. Relative error per coordinate is
// |a - n| / max(|a|, |n|, 1e-8). Throws kNonFinite on a non-finite probe.
FiniteDifferenceReport finite_difference_check(const ScalarFn& f, const VectorX& params,
                                               const VectorX& analytic, double h,
                                               std::uint64_t seed = 0);
FiniteDifferenceReport finite_difference_check(const ProbeFn& f, const VectorX& params,
                                               const VectorX& analytic, double h,
                                               std::uint64_t seed = 0);

// Coordinates the check visits, in order.
std::vector<int> sampled_coordinates(int size, std::uint64_t seed);

}  // namespace at3d::harness
