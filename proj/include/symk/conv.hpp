/* Copyright (c) 2026 The symkernels Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "symk/symmetry.hpp"
#include "symk/tensor.hpp"

namespace symk {

/// Sizes of one 3x3, stride-1, same-padded convolution.
struct ConvGeometry {
  std::size_t in_channels;
  std::size_t out_channels;
  std::size_t height;
  std::size_t width;

  std::size_t plane() const { return height * width; }
};

namespace detail {

/// Offsets (dy, dx) in {-1,0,1} for each row-major position of a tie class.
struct ClassTaps {
  std::array<int, 9> dy{};
  std::array<int, 9> dx{};
  std::size_t count = 0;
};

inline std::vector<ClassTaps> class_taps(const TiePattern& pattern) {
  std::vector<ClassTaps> taps(pattern.class_count);
  for (std::size_t cls = 0; cls < pattern.class_count; ++cls) {
    std::size_t n = 0;
    const auto positions = pattern.positions(cls, n);
    taps[cls].count = n;
    for (std::size_t t = 0; t < n; ++t) {
      taps[cls].dy[t] = static_cast<int>(positions[t] / 3) - 1;
      taps[cls].dx[t] = static_cast<int>(positions[t] % 3) - 1;
    }
  }
  return taps;
}

/// Dot product with four interleaved partial sums (fixed order, combined pairwise).
template <class Scalar>
Scalar dot(const Scalar* a, const Scalar* b, std::size_t n) {
  Scalar lane[4] = {};
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    lane[0] += a[p] * b[p];
    lane[1] += a[p + 1] * b[p + 1];
    lane[2] += a[p + 2] * b[p + 2];
    lane[3] += a[p + 3] * b[p + 3];
  }
  for (; p < n; ++p) lane[p % 4] += a[p] * b[p];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace detail

/**
 * Tied im2col: row (i * K + k) of `sums` holds, for every output pixel, the
 * sum of the zero-padded input of channel i over the positions of tie class k.
 *
 * Positions inside a class are accumulated in row-major kernel order. This is
 * the distributive step: one product per tie class replaces one per position.
 */
template <class Scalar>
void gather_class_sums(std::span<const Scalar> input, const ConvGeometry& g, const TiePattern& pattern,
                       std::span<Scalar> sums) {
  const std::size_t K = pattern.class_count;
  const std::size_t H = g.height;
  const std::size_t W = g.width;
  const auto taps = detail::class_taps(pattern);
  std::fill(sums.begin(), sums.end(), Scalar{});
  for (std::size_t i = 0; i < g.in_channels; ++i) {
    const Scalar* plane = input.data() + i * H * W;
    for (std::size_t k = 0; k < K; ++k) {
      Scalar* row = sums.data() + (i * K + k) * H * W;
      for (std::size_t t = 0; t < taps[k].count; ++t) {
        const int dy = taps[k].dy[t];
        const int dx = taps[k].dx[t];
        const std::size_t w0 = dx < 0 ? 1 : 0;
        const std::size_t w1 = dx > 0 ? W - 1 : W;
        for (std::size_t h = 0; h < H; ++h) {
          const auto sh = static_cast<std::ptrdiff_t>(h) + dy;
          if (sh < 0 || sh >= static_cast<std::ptrdiff_t>(H)) continue;
          const Scalar* src = plane + static_cast<std::size_t>(sh) * W;
          Scalar* dst = row + h * W;
          for (std::size_t w = w0; w < w1; ++w) dst[w] += src[static_cast<std::ptrdiff_t>(w) + dx];
        }
      }
    }
  }
}

/// Adjoint of gather_class_sums: spreads each class-sum gradient back onto the
/// input positions it was gathered from, adding into `grad_input`.
template <class Scalar>
void scatter_class_sums(std::span<const Scalar> grad_sums, const ConvGeometry& g, const TiePattern& pattern,
                        std::span<Scalar> grad_input) {
  const std::size_t K = pattern.class_count;
  const std::size_t H = g.height;
  const std::size_t W = g.width;
  const auto taps = detail::class_taps(pattern);
  for (std::size_t i = 0; i < g.in_channels; ++i) {
    Scalar* plane = grad_input.data() + i * H * W;
    for (std::size_t k = 0; k < K; ++k) {
      const Scalar* row = grad_sums.data() + (i * K + k) * H * W;
      for (std::size_t t = 0; t < taps[k].count; ++t) {
        const int dy = taps[k].dy[t];
        const int dx = taps[k].dx[t];
        const std::size_t w0 = dx < 0 ? 1 : 0;
        const std::size_t w1 = dx > 0 ? W - 1 : W;
        for (std::size_t h = 0; h < H; ++h) {
          const auto sh = static_cast<std::ptrdiff_t>(h) + dy;
          if (sh < 0 || sh >= static_cast<std::ptrdiff_t>(H)) continue;
          Scalar* dst = plane + static_cast<std::size_t>(sh) * W;
          const Scalar* src = row + h * W;
          for (std::size_t w = w0; w < w1; ++w) dst[static_cast<std::ptrdiff_t>(w) + dx] += src[w];
        }
      }
    }
  }
}

/**
 * Same-padded stride-1 convolution with tied 3x3 kernels.
 *
 * `weights` is laid out (out, in, class); output pixel p of channel o is
 * bias[o] + sum over in-channels ascending, then classes ascending, of
 * weight * class_sum. Exactly K multiplications per output per channel pair.
 */
template <class Scalar>
void tied_conv_forward(std::span<const Scalar> input, const ConvGeometry& g, std::span<const Scalar> weights,
                       std::span<const Scalar> bias, SymmetryLevel level, std::span<Scalar> output) {
  const TiePattern pattern = tie_pattern(level);
  const std::size_t rows = g.in_channels * pattern.class_count;
  const std::size_t HW = g.plane();
  std::vector<Scalar> sums(rows * HW);
  gather_class_sums<Scalar>(input, g, pattern, sums);
  for (std::size_t o = 0; o < g.out_channels; ++o) {
    Scalar* out = output.data() + o * HW;
    std::fill(out, out + HW, bias[o]);
    const Scalar* w_row = weights.data() + o * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      const Scalar w = w_row[j];
      const Scalar* s = sums.data() + j * HW;
      for (std::size_t p = 0; p < HW; ++p) out[p] += w * s[p];
    }
  }
}

/// Reverse pass of tied_conv_forward. All gradient outputs are overwritten.
template <class Scalar>
void tied_conv_backward(std::span<const Scalar> input, const ConvGeometry& g, std::span<const Scalar> weights,
                        SymmetryLevel level, std::span<const Scalar> grad_output, std::span<Scalar> grad_input,
                        std::span<Scalar> grad_weights, std::span<Scalar> grad_bias) {
  const TiePattern pattern = tie_pattern(level);
  const std::size_t rows = g.in_channels * pattern.class_count;
  const std::size_t HW = g.plane();
  std::vector<Scalar> sums(rows * HW);
  gather_class_sums<Scalar>(input, g, pattern, sums);

  std::vector<Scalar> grad_sums(rows * HW, Scalar{});
  for (std::size_t o = 0; o < g.out_channels; ++o) {
    const Scalar* go = grad_output.data() + o * HW;
    Scalar b{};
    for (std::size_t p = 0; p < HW; ++p) b += go[p];
    grad_bias[o] = b;
    const Scalar* w_row = weights.data() + o * rows;
    Scalar* gw_row = grad_weights.data() + o * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      const Scalar* s = sums.data() + j * HW;
      gw_row[j] = detail::dot(go, s, HW);
      const Scalar w = w_row[j];
      Scalar* gs = grad_sums.data() + j * HW;
      for (std::size_t p = 0; p < HW; ++p) gs[p] += w * go[p];
    }
  }
  std::fill(grad_input.begin(), grad_input.end(), Scalar{});
  scatter_class_sums<Scalar>(grad_sums, g, pattern, grad_input);
}

/// A dense-block convolution: tied kernels plus one bias per output channel.
struct ConvLayer {
  SymmetricKernelParams kernels;
  std::vector<double> bias;

  ConvLayer(SymmetryLevel level, std::size_t in_channels, std::size_t out_channels)
      : kernels(level, out_channels, in_channels), bias(out_channels, 0.0) {}

  ConvLayer(SymmetricKernelParams k, std::vector<double> b) : kernels(std::move(k)), bias(std::move(b)) {
    if (bias.size() != kernels.out_channels()) throw ShapeError("ConvLayer: bias length must equal out_channels");
  }

  SymmetryLevel level() const { return kernels.level(); }
  std::size_t in_channels() const { return kernels.in_channels(); }
  std::size_t out_channels() const { return kernels.out_channels(); }
  std::size_t parameter_count() const { return kernels.values().size() + bias.size(); }
};

struct ConvGradients {
  Tensor input;   // (C_in, H, W)
  Tensor kernel;  // (C_out, C_in, K), folded onto the free parameters
  std::vector<double> bias;
};

namespace detail {

inline ConvGeometry checked_geometry(const Tensor& input, const ConvLayer& layer) {
  if (input.rank() != 3 || input.channels() != layer.in_channels()) {
    throw ShapeError("conv2d: input " + Tensor::describe(input.shape()) + " does not match layer with " +
                     std::to_string(layer.in_channels()) + " input channels");
  }
  return {layer.in_channels(), layer.out_channels(), input.height(), input.width()};
}

}  // namespace detail

inline Tensor conv2d_forward(const Tensor& input, const ConvLayer& layer) {
  const ConvGeometry g = detail::checked_geometry(input, layer);
  Tensor out = Tensor::zeros({g.out_channels, g.height, g.width});
  tied_conv_forward<double>(input.data(), g, layer.kernels.values().data(), layer.bias, layer.level(), out.data());
  return out;
}

inline ConvGradients conv2d_backward(const Tensor& input, const ConvLayer& layer, const Tensor& grad_out) {
  const ConvGeometry g = detail::checked_geometry(input, layer);
  if (grad_out.shape() != Tensor::Shape{g.out_channels, g.height, g.width}) {
    throw ShapeError("conv2d_backward: grad_out shape " + Tensor::describe(grad_out.shape()) +
                     " does not match forward output");
  }
  ConvGradients grads{Tensor::zeros(input.shape()), Tensor::zeros(layer.kernels.values().shape()),
                      std::vector<double>(g.out_channels, 0.0)};
  tied_conv_backward<double>(input.data(), g, layer.kernels.values().data(), layer.level(), grad_out.data(),
                             grads.input.data(), grads.kernel.data(), grads.bias);
  return grads;
}

}  // namespace symk
