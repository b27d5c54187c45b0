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

#include <string>

#include "at3d/core/image.hpp"

namespace at3d::render {

// Binary PPM (P6, 8-bit); values are rounded and clamped to [0, 255].
void save_ppm(const Image& image, const std::string& path);
Image load_ppm(const std::string& path);

// Binary PGM (P5, 8-bit); mask pixels are written as 0 or 255.
void save_pgm(const Mask& mask, const std::string& path);

// Debug dump, little-endian:
//   char[8] "AT3DRAW1", u32 height, u32 width, u32 channels, u32 dtype
//   (0 = f64, 1 = u8), then height*width*channels values, row-major.
void save_raw(const Image& image, const std::string& path);
void save_raw(const Mask& mask, const std::string& path);
Image load_raw_image(const std::string& path);

}  // namespace at3d::render
