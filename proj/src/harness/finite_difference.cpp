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

#include "at3d/harness/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "at3d/core/error.hpp"
#include "at3d/core/rng.hpp"

namespace at3d::harness {

std::vector<int> sampled_coordinates(int size, std::uint64_t seed) {
  std::vector<int> all(static_cast<std::size_t>(std::max(size, 0)));
  std::iota(all.begin(), all.end(), 0);
  if (size <= kMaxCheckedCoordinates) return all;
  // Partial Fisher-Yates with the portable generator.
  Rng rng(seed);
  for (int i = 0; i < kMaxCheckedCoordinates; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(size - i));
    std::swap(all[i], all[j]);
  }
  all.resize(kMaxCheckedCoordinates);
  std::sort(all.begin(), all.end());
  return all;
}

FiniteDifferenceReport finite_difference_check(const ProbeFn& f, const VectorX& params,
                                               const VectorX& analytic, double h,
                                               std::uint64_t seed) {
  require(h > 0.0, ErrorCode::kInvalidArgument, "finite_difference_check: h must be > 0");
  require(params.size() == analytic.size(), ErrorCode::kDimensionMismatch,
          "finite_difference_check: gradient size differs from parameter size");
  FiniteDifferenceReport report;
  // `f` may write through to the caller's storage for `params`.
  const VectorX base = params;
  VectorX probe = base;
  for (int i : sampled_coordinates(static_cast<int>(base.size()), seed)) {
    probe[i] = base[i] + h;
    const std::optional<double> up = f(probe);
    probe[i] = base[i] - h;
    const std::optional<double> down = f(probe);
    probe[i] = base[i];
    if (!up || !down) {
      ++report.skipped;
      continue;
    }
    require(std::isfinite(*up) && std::isfinite(*down), ErrorCode::kNonFinite,
            "finite_difference_check: non-finite probe at coordinate " + std::to_string(i));
    const double numeric = (*up - *down) / (2.0 * h);
    const double a = analytic[i];
    const double err = std::abs(a - numeric) /
                       std::max({std::abs(a), std::abs(numeric), 1e-8});
    ++report.checked;
    if (err > report.max_relative_error || report.worst_index < 0) {
      report.max_relative_error = std::max(report.max_relative_error, err);
      report.worst_index = i;
      report.worst_analytic = a;
      report.worst_numeric = numeric;
    }
  }
  return report;
}

FiniteDifferenceReport finite_difference_check(const ScalarFn& f, const VectorX& params,
                                               const VectorX& analytic, double h,
                                               std::uint64_t seed) {
  return finite_difference_check(
      ProbeFn([&f](const VectorX& p) { return std::optional<double>(f(p)); }), params,
      analytic, h, seed);
}

}  // namespace at3d::harness
