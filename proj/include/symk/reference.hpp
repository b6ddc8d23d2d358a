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

// Naive reference implementations, deliberately sharing no code path with
// the tied im2col kernels in conv.hpp. Used as oracles by the test suites
// and by the `verify` command.

#include <cstddef>
#include <vector>

#include "symk/conv.hpp"
#include "symk/symmetry.hpp"
#include "symk/tensor.hpp"

namespace symk::reference {

/// Full 3x3 kernels of every (out, in) slice, shape (out, in, 9).
inline Tensor expanded_kernels(const SymmetricKernelParams& params) {
  Tensor full = Tensor::zeros({params.out_channels(), params.in_channels(), 9});
  for (std::size_t o = 0; o < params.out_channels(); ++o) {
    for (std::size_t i = 0; i < params.in_channels(); ++i) {
      const auto k = params.expanded(o, i);
      for (std::size_t p = 0; p < 9; ++p) full[(o * params.in_channels() + i) * 9 + p] = k[p];
    }
  }
  return full;
}

/// Direct same-padded cross-correlation with full (out, in, 9) kernels.
inline Tensor naive_conv2d(const Tensor& input, const Tensor& kernels, const std::vector<double>& bias) {
  const std::size_t C = input.channels(), H = input.height(), W = input.width();
  const std::size_t O = kernels.extent(0);
  Tensor out = Tensor::zeros({O, H, W});
  for (std::size_t o = 0; o < O; ++o) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        double acc = bias[o];
        for (std::size_t i = 0; i < C; ++i) {
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
              const long sh = static_cast<long>(h) + r - 1;
              const long sw = static_cast<long>(w) + c - 1;
              if (sh < 0 || sw < 0 || sh >= static_cast<long>(H) || sw >= static_cast<long>(W)) continue;
              acc += kernels[(o * C + i) * 9 + static_cast<std::size_t>(r * 3 + c)] *
                     input.at(i, static_cast<std::size_t>(sh), static_cast<std::size_t>(sw));
            }
          }
        }
        out.at(o, h, w) = acc;
      }
    }
  }
  return out;
}

inline Tensor naive_conv2d(const Tensor& input, const ConvLayer& layer) {
  return naive_conv2d(input, expanded_kernels(layer.kernels), layer.bias);
}

/// Gradient with respect to every full-kernel entry, shape (out, in, 9).
inline Tensor naive_full_kernel_gradient(const Tensor& input, const Tensor& grad_out) {
  const std::size_t C = input.channels(), H = input.height(), W = input.width();
  const std::size_t O = grad_out.channels();
  Tensor g = Tensor::zeros({O, C, 9});
  for (std::size_t o = 0; o < O; ++o) {
    for (std::size_t i = 0; i < C; ++i) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (std::size_t h = 0; h < H; ++h) {
            for (std::size_t w = 0; w < W; ++w) {
              const long sh = static_cast<long>(h) + r - 1;
              const long sw = static_cast<long>(w) + c - 1;
              if (sh < 0 || sw < 0 || sh >= static_cast<long>(H) || sw >= static_cast<long>(W)) continue;
              acc += grad_out.at(o, h, w) * input.at(i, static_cast<std::size_t>(sh), static_cast<std::size_t>(sw));
            }
          }
          g[(o * C + i) * 9 + static_cast<std::size_t>(r * 3 + c)] = acc;
        }
      }
    }
  }
  return g;
}

/// Transposed convolution of grad_out with full kernels: gradient w.r.t. the input.
inline Tensor naive_input_gradient(const Tensor& grad_out, const Tensor& kernels, std::size_t in_channels) {
  const std::size_t O = grad_out.channels(), H = grad_out.height(), W = grad_out.width();
  Tensor gx = Tensor::zeros({in_channels, H, W});
  for (std::size_t o = 0; o < O; ++o) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        const double gy = grad_out.at(o, h, w);
        for (std::size_t i = 0; i < in_channels; ++i) {
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
              const long sh = static_cast<long>(h) + r - 1;
              const long sw = static_cast<long>(w) + c - 1;
              if (sh < 0 || sw < 0 || sh >= static_cast<long>(H) || sw >= static_cast<long>(W)) continue;
              gx.at(i, static_cast<std::size_t>(sh), static_cast<std::size_t>(sw)) +=
                  kernels[(o * in_channels + i) * 9 + static_cast<std::size_t>(r * 3 + c)] * gy;
            }
          }
        }
      }
    }
  }
  return gx;
}

}  // namespace symk::reference
