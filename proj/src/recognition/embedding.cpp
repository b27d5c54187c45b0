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

#include "at3d/recognition/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "at3d/core/error.hpp"
#include "at3d/core/rng.hpp"

namespace at3d::recognition {

namespace {

// Weight scale relative to 1/sqrt(fan_in); > 1 keeps tanh out of its linear
// regime so the network is not a near-linear map of the input.
constexpr double kConvGain = 1.6;
constexpr double kBiasStd = 0.2;

int output_size(int in, int kernel, int stride) {
  const int pad = kernel / 2;
  return (in + 2 * pad - kernel) / stride + 1;
}

// Valid output range [lo, hi) along one axis for kernel tap `k`.
void tap_range(int k, int pad, int stride, int in, int out, int& lo, int& hi) {
  // need 0 <= o * stride + k - pad < in
  const int offset = k - pad;
  lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  hi = std::min(out, (in - offset + stride - 1) / stride);
  if (in - offset <= 0) hi = 0;
  if (hi < lo) hi = lo;
}

void conv_forward(const ConvLayer& layer, const double* w, const double* b,
                  const std::vector<double>& in, int ih, int iw,
                  std::vector<double>& out, int oh, int ow) {
  const int k = layer.kernel, s = layer.stride, pad = k / 2;
  out.assign(static_cast<std::size_t>(layer.out_channels) * oh * ow, 0.0);
  for (int oc = 0; oc < layer.out_channels; ++oc) {
    double* o = &out[static_cast<std::size_t>(oc) * oh * ow];
    std::fill(o, o + oh * ow, b[oc]);
    for (int ic = 0; ic < layer.in_channels; ++ic) {
      const double* src = &in[static_cast<std::size_t>(ic) * ih * iw];
      for (int ky = 0; ky < k; ++ky) {
        int y_lo, y_hi;
        tap_range(ky, pad, s, ih, oh, y_lo, y_hi);
        for (int kx = 0; kx < k; ++kx) {
          int x_lo, x_hi;
          tap_range(kx, pad, s, iw, ow, x_lo, x_hi);
          const double wv = w[((oc * layer.in_channels + ic) * k + ky) * k + kx];
          for (int oy = y_lo; oy < y_hi; ++oy) {
            const double* row = src + (oy * s + ky - pad) * iw + (kx - pad);
            double* orow = o + oy * ow;
            for (int ox = x_lo; ox < x_hi; ++ox) orow[ox] += wv * row[ox * s];
          }
        }
      }
    }
    for (int i = 0; i < oh * ow; ++i) o[i] = std::tanh(o[i]);
  }
}

// d_in += conv^T(d_pre).
void conv_backward_input(const ConvLayer& layer, const double* w,
                         const std::vector<double>& d_pre, int oh, int ow,
                         std::vector<double>& d_in, int ih, int iw) {
  const int k = layer.kernel, s = layer.stride, pad = k / 2;
  d_in.assign(static_cast<std::size_t>(layer.in_channels) * ih * iw, 0.0);
  for (int oc = 0; oc < layer.out_channels; ++oc) {
    const double* g = &d_pre[static_cast<std::size_t>(oc) * oh * ow];
    for (int ic = 0; ic < layer.in_channels; ++ic) {
      double* dst = &d_in[static_cast<std::size_t>(ic) * ih * iw];
      for (int ky = 0; ky < k; ++ky) {
        int y_lo, y_hi;
        tap_range(ky, pad, s, ih, oh, y_lo, y_hi);
        for (int kx = 0; kx < k; ++kx) {
          int x_lo, x_hi;
          tap_range(kx, pad, s, iw, ow, x_lo, x_hi);
          const double wv = w[((oc * layer.in_channels + ic) * k + ky) * k + kx];
          for (int oy = y_lo; oy < y_hi; ++oy) {
            double* row = dst + (oy * s + ky - pad) * iw + (kx - pad);
            const double* grow = g + oy * ow;
            for (int ox = x_lo; ox < x_hi; ++ox) row[ox * s] += wv * grow[ox];
          }
        }
      }
    }
  }
}

std::size_t conv_weight_count(const ConvLayer& l) {
  return static_cast<std::size_t>(l.out_channels) * l.in_channels * l.kernel *
             l.kernel + l.out_channels;
}

}  // namespace

const char* architecture_name(Architecture arch) {
  return arch == Architecture::kA ? "A" : "B";
}

Architecture parse_architecture(const std::string& name) {
  if (name == "A") return Architecture::kA;
  if (name == "B") return Architecture::kB;
  fail(ErrorCode::kInvalidArgument, "unknown architecture '" + name + "' (expected A or B)");
}

std::size_t EmbeddingModel::expected_weight_count() const {
  std::size_t count = 0;
  for (const auto& l : layers) count += conv_weight_count(l);
  const int last = layers.empty() ? 3 : layers.back().out_channels;
  return count + static_cast<std::size_t>(embedding_dim) * last + embedding_dim;
}

EmbeddingModel build_toy_model(Architecture arch, std::uint64_t seed,
                               int input_width, int input_height) {
  require(input_width >= 8 && input_height >= 8, ErrorCode::kInvalidArgument,
          "build_toy_model: input must be at least 8x8");
  EmbeddingModel m;
  m.architecture = arch;
  m.seed = seed;
  m.input_width = input_width;
  m.input_height = input_height;
  if (arch == Architecture::kA) {
    m.layers = {{3, 2, 3, 8}, {3, 2, 8, 16}, {3, 2, 16, 32}};
  } else {
    m.layers = {{5, 2, 3, 12}, {3, 2, 12, 16}, {3, 1, 16, 24}, {3, 2, 24, 32}};
  }
  Rng rng(derive_seed(seed, arch == Architecture::kA ? 0xA : 0xB));
  m.weights.reserve(m.expected_weight_count());
  for (const auto& l : m.layers) {
    const double fan_in = static_cast<double>(l.in_channels) * l.kernel * l.kernel;
    const double std = kConvGain / std::sqrt(fan_in);
    for (int i = 0; i < l.out_channels * l.in_channels * l.kernel * l.kernel; ++i)
      m.weights.push_back(rng.normal() * std);
    for (int i = 0; i < l.out_channels; ++i) m.weights.push_back(rng.normal() * kBiasStd);
  }
  const int last = m.layers.back().out_channels;
  const double std = 1.0 / std::sqrt(static_cast<double>(last));
  for (int i = 0; i < m.embedding_dim * last; ++i) m.weights.push_back(rng.normal() * std);
  for (int i = 0; i < m.embedding_dim; ++i) m.weights.push_back(0.0);
  return m;
}

Embedding embed(const EmbeddingModel& model, const Image& image) {
  require(image.width == model.input_width && image.height == model.input_height,
          ErrorCode::kDimensionMismatch,
          "embed: image is " + std::to_string(image.width) + "x" +
              std::to_string(image.height) + ", model expects " +
              std::to_string(model.input_width) + "x" +
              std::to_string(model.input_height));
  require(model.weights.size() == model.expected_weight_count(),
          ErrorCode::kDimensionMismatch, "embed: weight array has the wrong size");
  Embedding out;
  auto& cache = out.cache;
  cache.model = &model;
  const int h = image.height, w = image.width;

  std::vector<double> input(static_cast<std::size_t>(3) * h * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        input[(static_cast<std::size_t>(c) * h + y) * w + x] = image.at(x, y, c) / 255.0;
  cache.activations.push_back(std::move(input));
  cache.heights.push_back(h);
  cache.widths.push_back(w);

  const double* wp = model.weights.data();
  for (const auto& layer : model.layers) {
    const int ih = cache.heights.back(), iw = cache.widths.back();
    const int oh = output_size(ih, layer.kernel, layer.stride);
    const int ow = output_size(iw, layer.kernel, layer.stride);
    const double* weights = wp;
    const double* bias = wp + layer.out_channels * layer.in_channels * layer.kernel * layer.kernel;
    std::vector<double> act;
    conv_forward(layer, weights, bias, cache.activations.back(), ih, iw, act, oh, ow);
    cache.activations.push_back(std::move(act));
    cache.heights.push_back(oh);
    cache.widths.push_back(ow);
    wp += conv_weight_count(layer);
  }

  const int channels = model.layers.back().out_channels;
  const int area = cache.heights.back() * cache.widths.back();
  const auto& last = cache.activations.back();
  cache.pooled.resize(channels);
  for (int c = 0; c < channels; ++c) {
    double s = 0.0;
    for (int i = 0; i < area; ++i) s += last[static_cast<std::size_t>(c) * area + i];
    cache.pooled(c) = s / area;
  }
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      fc(wp, model.embedding_dim, channels);
  const Eigen::Map<const VectorX> fc_bias(wp + model.embedding_dim * channels, model.embedding_dim);
  cache.pre_norm = fc * cache.pooled + fc_bias;
  const double norm = cache.pre_norm.norm();
  require(norm > 0.0, ErrorCode::kNonFinite, "embed: zero pre-normalization vector");
  cache.embedding = cache.pre_norm / norm;
  out.vector = cache.embedding;
  return out;
}

Image embed_backward(const EmbeddingModel& model, const EmbeddingCache& cache,
                     const VectorX& dL_dembedding) {
  require(cache.model == &model &&
              cache.activations.size() == model.layers.size() + 1,
          ErrorCode::kCacheMismatch, "embed_backward: cache belongs to another model");
  require(dL_dembedding.size() == model.embedding_dim, ErrorCode::kDimensionMismatch,
          "embed_backward: gradient has the wrong dimension");

  // Normalization: e = z / |z|.
  const double norm = cache.pre_norm.norm();
  const VectorX& e = cache.embedding;
  const VectorX dz = (dL_dembedding - e * e.dot(dL_dembedding)) / norm;

  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const auto& l : model.layers) {
    offsets.push_back(off);
    off += conv_weight_count(l);
  }
  const int channels = model.layers.back().out_channels;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      fc(model.weights.data() + off, model.embedding_dim, channels);
  const VectorX d_pooled = fc.transpose() * dz;

  // Global average pool.
  const std::size_t L = model.layers.size();
  const int area = cache.heights[L] * cache.widths[L];
  std::vector<double> d_act(static_cast<std::size_t>(channels) * area);
  for (int c = 0; c < channels; ++c)
    std::fill_n(d_act.begin() + static_cast<std::ptrdiff_t>(c) * area, area, d_pooled(c) / area);

  std::vector<double> d_in;
  for (std::size_t li = L; li-- > 0;) {
    const auto& layer = model.layers[li];
    const auto& act = cache.activations[li + 1];
    for (std::size_t i = 0; i < d_act.size(); ++i) d_act[i] *= 1.0 - act[i] * act[i];
    conv_backward_input(layer, model.weights.data() + offsets[li], d_act,
                        cache.heights[li + 1], cache.widths[li + 1], d_in,
                        cache.heights[li], cache.widths[li]);
    d_act.swap(d_in);
  }

  const int h = cache.heights[0], w = cache.widths[0];
  Image grad(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        grad.at(x, y, c) = d_act[(static_cast<std::size_t>(c) * h + y) * w + x] / 255.0;
  return grad;
}

}  // namespace at3d::recognition
