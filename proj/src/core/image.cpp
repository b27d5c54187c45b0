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

#include "at3d/core/image.hpp"

#include <string>

#include "at3d/core/error.hpp"

namespace at3d {

std::size_t Mask::count() const {
  std::size_t n = 0;
  for (auto v : data) n += v ? 1 : 0;
  return n;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  require(a.same_shape(b), ErrorCode::kDimensionMismatch,
          std::string(what) + ": image dimensions differ (" +
              std::to_string(a.width) + "x" + std::to_string(a.height) +
              " vs " + std::to_string(b.width) + "x" +
              std::to_string(b.height) + ")");
}

}  // namespace at3d
