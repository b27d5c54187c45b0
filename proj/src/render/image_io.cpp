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

#include "at3d/render/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "at3d/core/binary_io.hpp"
#include "at3d/core/error.hpp"

namespace at3d::render {

namespace {

constexpr char kRawMagic[9] = "AT3DRAW1";

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

std::ofstream open_out(const std::string& path, const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo,
          std::string(what) + ": cannot open " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path, const char* what) {
  out.flush();
  require(static_cast<bool>(out), ErrorCode::kIo,
          std::string(what) + ": write failed for " + path);
}

}  // namespace

void save_ppm(const Image& image, const std::string& path) {
  auto out = open_out(path, "save_ppm");
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<std::uint8_t> bytes(image.size());
  std::transform(image.data.begin(), image.data.end(), bytes.begin(), to_byte);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  finish(out, path, "save_ppm");
}

Image load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "load_ppm: cannot open " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  require(magic == "P6" && w > 0 && h > 0 && maxval == 255,
          ErrorCode::kMalformedFile, path + ": not an 8-bit binary PPM");
  in.get();
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(in), ErrorCode::kMalformedFile, path + ": truncated PPM");
  Image image(w, h);
  std::copy(bytes.begin(), bytes.end(), image.data.begin());
  return image;
}

void save_pgm(const Mask& mask, const std::string& path) {
  auto out = open_out(path, "save_pgm");
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<std::uint8_t> bytes(mask.data.size());
  std::transform(mask.data.begin(), mask.data.end(), bytes.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 255 : 0; });
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  finish(out, path, "save_pgm");
}

void save_raw(const Image& image, const std::string& path) {
  auto out = open_out(path, "save_raw");
  BinaryWriter w(out);
  w.put_magic(kRawMagic);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(image.height));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(image.width));
  w.put<std::uint32_t>(3);
  w.put<std::uint32_t>(0);
  w.put_array(image.data.data(), image.data.size());
  finish(out, path, "save_raw");
}

void save_raw(const Mask& mask, const std::string& path) {
  auto out = open_out(path, "save_raw");
  BinaryWriter w(out);
  w.put_magic(kRawMagic);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(mask.height));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(mask.width));
  w.put<std::uint32_t>(1);
  w.put<std::uint32_t>(1);
  w.put_array(mask.data.data(), mask.data.size());
  finish(out, path, "save_raw");
}

Image load_raw_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "load_raw_image: cannot open " + path);
  BinaryReader r(in, path);
  r.expect_magic(kRawMagic);
  const auto h = r.get<std::uint32_t>();
  const auto w = r.get<std::uint32_t>();
  const auto channels = r.get<std::uint32_t>();
  const auto dtype = r.get<std::uint32_t>();
  require(channels == 3 && dtype == 0 && w > 0 && h > 0 && w < 65536 && h < 65536,
          ErrorCode::kMalformedFile, path + ": not a 3-channel f64 raw image");
  Image image(static_cast<int>(w), static_cast<int>(h));
  r.get_array(image.data.data(), image.data.size());
  return image;
}

}  // namespace at3d::render
