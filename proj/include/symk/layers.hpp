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
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symk/conv.hpp"
#include "symk/tensor.hpp"

namespace symk {

inline Tensor relu_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

// Subgradient at 0 is 0.
inline Tensor relu_backward(const Tensor& x, const Tensor& grad_y) {
  if (x.shape() != grad_y.shape()) throw ShapeError("relu_backward: shape mismatch");
  Tensor grad_x = grad_y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) grad_x[i] = 0.0;
  }
  return grad_x;
}

inline Tensor avg_pool2x2_forward(const Tensor& x) {
  if (x.rank() != 3 || x.height() % 2 != 0 || x.width() % 2 != 0) {
    throw ShapeError("avg_pool2x2: needs (C,H,W) with even H and W, got " + Tensor::describe(x.shape()));
  }
  const std::size_t H = x.height() / 2;
  const std::size_t W = x.width() / 2;
  Tensor y = Tensor::zeros({x.channels(), H, W});
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        const double s = (x.at(c, 2 * h, 2 * w) + x.at(c, 2 * h, 2 * w + 1)) +
                         (x.at(c, 2 * h + 1, 2 * w) + x.at(c, 2 * h + 1, 2 * w + 1));
        y.at(c, h, w) = 0.25 * s;
      }
    }
  }
  return y;
}

inline Tensor avg_pool2x2_backward(const Tensor& grad_y) {
  if (grad_y.rank() != 3) throw ShapeError("avg_pool2x2_backward: needs a (C,H,W) gradient");
  Tensor grad_x = Tensor::zeros({grad_y.channels(), 2 * grad_y.height(), 2 * grad_y.width()});
  for (std::size_t c = 0; c < grad_x.channels(); ++c) {
    for (std::size_t h = 0; h < grad_x.height(); ++h) {
      for (std::size_t w = 0; w < grad_x.width(); ++w) grad_x.at(c, h, w) = 0.25 * grad_y.at(c, h / 2, w / 2);
    }
  }
  return grad_x;
}

/// Per-channel spatial mean; returns a rank-1 tensor of length C.
inline Tensor global_avg_pool_forward(const Tensor& x) {
  if (x.rank() != 3) throw ShapeError("global_avg_pool: needs a (C,H,W) tensor, got " + Tensor::describe(x.shape()));
  Tensor y = Tensor::zeros({x.channels()});
  const double inv = 1.0 / static_cast<double>(x.height() * x.width());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    double s = 0.0;
    for (double v : x.channel(c)) s += v;
    y[c] = s * inv;
  }
  return y;
}

inline Tensor global_avg_pool_backward(const Tensor& grad_y, std::size_t height, std::size_t width) {
  Tensor grad_x = Tensor::zeros({grad_y.size(), height, width});
  const double inv = 1.0 / static_cast<double>(height * width);
  for (std::size_t c = 0; c < grad_y.size(); ++c) {
    for (double& v : grad_x.channel(c)) v = grad_y[c] * inv;
  }
  return grad_x;
}

/// Concatenates the block input with its rectified convolution.
inline Tensor dense_block_forward(const Tensor& x, const ConvLayer& layer) {
  return concat_channels(x, relu_forward(conv2d_forward(x, layer)));
}

/// Affine head: logits[j] = sum_i weights(i, j) * v[i] + bias[j].
struct FullyConnected {
  Tensor weights;  // (inputs, outputs)
  std::vector<double> bias;

  FullyConnected(std::size_t inputs, std::size_t outputs)
      : weights(Tensor::zeros({inputs, outputs})), bias(outputs, 0.0) {}

  std::size_t inputs() const { return weights.extent(0); }
  std::size_t outputs() const { return weights.extent(1); }
  std::size_t parameter_count() const { return weights.size() + bias.size(); }
};

inline Tensor fully_connected_forward(const Tensor& v, const FullyConnected& fc) {
  if (v.size() != fc.inputs()) {
    throw ShapeError("fully_connected: expected " + std::to_string(fc.inputs()) + " inputs, got " +
                     std::to_string(v.size()));
  }
  Tensor logits = Tensor::from_values({fc.outputs()}, fc.bias);
  const std::size_t n = fc.outputs();
  for (std::size_t i = 0; i < fc.inputs(); ++i) {
    const double vi = v[i];
    for (std::size_t j = 0; j < n; ++j) logits[j] += fc.weights[i * n + j] * vi;
  }
  return logits;
}

struct FullyConnectedGradients {
  Tensor input;    // (inputs)
  Tensor weights;  // (inputs, outputs)
  std::vector<double> bias;
};

inline FullyConnectedGradients fully_connected_backward(const Tensor& v, const FullyConnected& fc,
                                                        const Tensor& grad_logits) {
  if (v.size() != fc.inputs() || grad_logits.size() != fc.outputs()) {
    throw ShapeError("fully_connected_backward: dimension mismatch");
  }
  const std::size_t n = fc.outputs();
  FullyConnectedGradients g{Tensor::zeros({fc.inputs()}), Tensor::zeros(fc.weights.shape()),
                            std::vector<double>(grad_logits.values())};
  for (std::size_t i = 0; i < fc.inputs(); ++i) {
    double gv = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      gv += fc.weights[i * n + j] * grad_logits[j];
      g.weights[i * n + j] = v[i] * grad_logits[j];
    }
    g.input[i] = gv;
  }
  return g;
}

struct SoftmaxLoss {
  double loss;
  Tensor probs;
  Tensor grad_logits;
};

/// Numerically stable softmax plus categorical cross-entropy against `label`.
inline SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::size_t label) {
  if (label >= logits.size()) {
    throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(label) + " out of range for " +
                            std::to_string(logits.size()) + " classes");
  }
  const double top = *std::max_element(logits.data().begin(), logits.data().end());
  Tensor probs = logits;
  double total = 0.0;
  for (double& v : probs.data()) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : probs.data()) v /= total;
  const double loss = -((logits[label] - top) - std::log(total));
  Tensor grad = probs;
  grad[label] -= 1.0;
  return {loss, std::move(probs), std::move(grad)};
}

}  // namespace symk
