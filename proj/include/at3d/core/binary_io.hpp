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

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "at3d/core/error.hpp"

namespace at3d {

static_assert(std::endian::native == std::endian::little,
              "binary containers are written in host order, which must be little-endian");

// Minimal little-endian writer/reader for the project's binary containers.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  template <typename T>
  void put_array(const T* data, std::size_t count) {
    out_.write(reinterpret_cast<const char*>(data),
               static_cast<std::streamsize>(count * sizeof(T)));
  }
  void put_magic(const char (&magic)[9]) { out_.write(magic, 8); }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  template <typename T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    check();
    return value;
  }
  template <typename T>
  void get_array(T* data, std::size_t count) {
    in_.read(reinterpret_cast<char*>(data),
             static_cast<std::streamsize>(count * sizeof(T)));
    check();
  }
  void expect_magic(const char (&magic)[9]) {
    char buf[8];
    in_.read(buf, 8);
    check();
    require(std::memcmp(buf, magic, 8) == 0, ErrorCode::kMalformedFile,
            source_ + ": bad magic, expected " + std::string(magic, 8));
  }

 private:
  void check() {
    require(static_cast<bool>(in_), ErrorCode::kMalformedFile,
            source_ + ": truncated file");
  }

  std::istream& in_;
  std::string source_;
};

}  // namespace at3d
