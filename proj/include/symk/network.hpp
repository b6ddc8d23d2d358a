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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symk/conv.hpp"
#include "symk/layers.hpp"
#include "symk/random.hpp"
#include "symk/symmetry.hpp"
#include "symk/tensor.hpp"

namespace symk {

/**
 * Shape of a single-layer-per-block DenseNet.
 *
 * Each block concatenates its input with `growth` rectified conv channels.
 * Blocks 1..n-1 are followed by 2x2 average pooling, the last by global
 * average pooling, then an affine head and softmax.
 */
struct NetworkConfig {
  SymmetryLevel level = SymmetryLevel::L0;
  std::size_t input_channels = 3;
  std::size_t input_size = 32;
  std::size_t growth = 30;
  std::size_t blocks = 4;
  std::size_t classes = 10;

  /// 3x32x32 -> 33 -> 63 -> 93 -> 123 channels, 32 -> 16 -> 8 -> 4 -> 1 pixels.
  static NetworkConfig cifar(SymmetryLevel level) { return {level, 3, 32, 30, 4, 10}; }

  /// Two blocks of depth 4 on 8x8 inputs; small enough for finite-difference checks.
  static NetworkConfig shrunken(SymmetryLevel level) { return {level, 3, 8, 4, 2, 10}; }

  std::size_t block_in_channels(std::size_t block) const { return input_channels + block * growth; }
  std::size_t block_size(std::size_t block) const { return input_size >> block; }
  std::size_t feature_channels() const { return input_channels + blocks * growth; }

  void validate() const {
    if (input_channels == 0 || growth == 0 || blocks == 0 || classes < 2) {
      throw std::invalid_argument("NetworkConfig: channels, growth, blocks must be positive and classes >= 2");
    }
    if (blocks > 16 || input_size == 0 || input_size % (std::size_t{1} << (blocks - 1)) != 0) {
      throw std::invalid_argument("NetworkConfig: input size " + std::to_string(input_size) +
                                  " is not divisible by 2^(blocks-1)");
    }
  }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Trainable parameters, in flat-view order:
/// for each block (kernel free parameters (out, in, class), bias), then head weights (in, out), head bias.
class Network {
 public:
  explicit Network(const NetworkConfig& config) : config_(config), head_(config.feature_channels(), config.classes) {
    config_.validate();
    convs_.reserve(config_.blocks);
    for (std::size_t b = 0; b < config_.blocks; ++b) {
      convs_.emplace_back(config_.level, config_.block_in_channels(b), config_.growth);
    }
  }

  const NetworkConfig& config() const noexcept { return config_; }
  SymmetryLevel level() const noexcept { return config_.level; }

  const std::vector<ConvLayer>& convs() const noexcept { return convs_; }
  std::vector<ConvLayer>& convs() noexcept { return convs_; }
  const FullyConnected& head() const noexcept { return head_; }
  FullyConnected& head() noexcept { return head_; }

  /// Parameter count of each layer in checkpoint order: the conv blocks, then the head.
  std::vector<std::size_t> layer_parameter_counts() const {
    std::vector<std::size_t> counts;
    for (const auto& c : convs_) counts.push_back(c.parameter_count());
    counts.push_back(head_.parameter_count());
    return counts;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t c : layer_parameter_counts()) n += c;
    return n;
  }

  std::vector<double> parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& c : convs_) {
      flat.insert(flat.end(), c.kernels.values().data().begin(), c.kernels.values().data().end());
      flat.insert(flat.end(), c.bias.begin(), c.bias.end());
    }
    flat.insert(flat.end(), head_.weights.data().begin(), head_.weights.data().end());
    flat.insert(flat.end(), head_.bias.begin(), head_.bias.end());
    return flat;
  }

  void set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
      throw ShapeError("set_parameters: expected " + std::to_string(parameter_count()) + " values, got " +
                       std::to_string(flat.size()));
    }
    auto it = flat.begin();
    auto take = [&it](std::span<double> dst) {
      std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
      it += static_cast<std::ptrdiff_t>(dst.size());
    };
    for (auto& c : convs_) {
      take(c.kernels.values().data());
      take(c.bias);
    }
    take(head_.weights.data());
    take(head_.bias);
  }

 private:
  NetworkConfig config_;
  std::vector<ConvLayer> convs_;
  FullyConnected head_;
};

/**
 * Uniform Glorot initialization with fan counts taken over the expanded 3x3
 * kernel (9 * channels), so activation scale does not depend on the level.
 * Biases are zero. Parameters are drawn in flat-view order.
 */
inline void initialize_glorot(Network& net, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1417));
  for (auto& conv : net.convs()) {
    const double fan = 9.0 * static_cast<double>(conv.in_channels() + conv.out_channels());
    const double bound = std::sqrt(6.0 / fan);
    for (double& v : conv.kernels.values().data()) v = rng.uniform(-bound, bound);
    std::fill(conv.bias.begin(), conv.bias.end(), 0.0);
  }
  auto& head = net.head();
  const double bound = std::sqrt(6.0 / static_cast<double>(head.inputs() + head.outputs()));
  for (double& v : head.weights.data()) v = rng.uniform(-bound, bound);
  std::fill(head.bias.begin(), head.bias.end(), 0.0);
}

inline Network make_network(const NetworkConfig& config, std::uint64_t seed) {
  Network net(config);
  initialize_glorot(net, seed);
  return net;
}

/// Sum over conv layers of out * in * free_param_count(level).
inline std::size_t conv_free_parameter_count(const NetworkConfig& config) {
  std::size_t n = 0;
  for (std::size_t b = 0; b < config.blocks; ++b) {
    n += config.growth * config.block_in_channels(b) * free_param_count(config.level);
  }
  return n;
}

inline std::size_t count_parameters(const NetworkConfig& config) {
  return conv_free_parameter_count(config) + config.blocks * config.growth +
         config.feature_channels() * config.classes + config.classes;
}

inline std::size_t count_parameters(const Network& net) { return net.parameter_count(); }

/// Intermediate values of one forward pass, kept for the reverse pass.
struct ForwardTrace {
  std::vector<Tensor> block_inputs;
  std::vector<Tensor> pre_activations;  // conv outputs before ReLU
  Tensor features;                      // globally pooled, length feature_channels
  Tensor logits;
};

inline void check_image(const Network& net, const Tensor& image) {
  const auto& c = net.config();
  if (image.shape() != Tensor::Shape{c.input_channels, c.input_size, c.input_size}) {
    throw ShapeError("network expects a (" + std::to_string(c.input_channels) + "," + std::to_string(c.input_size) +
                     "," + std::to_string(c.input_size) + ") image, got " + Tensor::describe(image.shape()));
  }
}

inline ForwardTrace forward_trace(const Network& net, const Tensor& image) {
  check_image(net, image);
  ForwardTrace trace;
  const std::size_t blocks = net.config().blocks;
  trace.block_inputs.reserve(blocks);
  trace.pre_activations.reserve(blocks);
  Tensor x = image;
  for (std::size_t b = 0; b < blocks; ++b) {
    Tensor pre = conv2d_forward(x, net.convs()[b]);
    Tensor out = concat_channels(x, relu_forward(pre));
    trace.block_inputs.push_back(std::move(x));
    trace.pre_activations.push_back(std::move(pre));
    if (b + 1 < blocks) {
      x = avg_pool2x2_forward(out);
    } else {
      trace.features = global_avg_pool_forward(out);
    }
  }
  trace.logits = fully_connected_forward(trace.features, net.head());
  return trace;
}

inline Tensor softmax(const Tensor& logits) { return softmax_cross_entropy(logits, 0).probs; }

/// Class posteriors for one image.
inline Tensor network_forward(const Network& net, const Tensor& image) {
  return softmax(forward_trace(net, image).logits);
}

/// Gradient of the loss with respect to Network::parameters(), same order.
struct Gradients {
  std::vector<double> flat;
};

struct LossAndGradients {
  double loss = 0.0;
  Tensor probs;
  Gradients gradients;
};

inline LossAndGradients network_backward(const Network& net, const Tensor& image, std::size_t label) {
  const ForwardTrace trace = forward_trace(net, image);
  SoftmaxLoss sl = softmax_cross_entropy(trace.logits, label);

  const auto counts = net.layer_parameter_counts();
  std::vector<std::size_t> offsets(counts.size(), 0);
  for (std::size_t i = 1; i < counts.size(); ++i) offsets[i] = offsets[i - 1] + counts[i - 1];
  std::vector<double> flat(net.parameter_count(), 0.0);

  const FullyConnected& head = net.head();
  FullyConnectedGradients hg = fully_connected_backward(trace.features, head, sl.grad_logits);
  auto head_out = flat.begin() + static_cast<std::ptrdiff_t>(offsets.back());
  head_out = std::copy(hg.weights.data().begin(), hg.weights.data().end(), head_out);
  std::copy(hg.bias.begin(), hg.bias.end(), head_out);

  const std::size_t blocks = net.config().blocks;
  const std::size_t last_size = net.config().block_size(blocks - 1);
  Tensor grad = global_avg_pool_backward(hg.input, last_size, last_size);
  for (std::size_t b = blocks; b-- > 0;) {
    const Tensor& x = trace.block_inputs[b];
    const ConvLayer& conv = net.convs()[b];
    const std::size_t in = x.channels();
    Tensor grad_pre = relu_backward(trace.pre_activations[b], slice_channels(grad, in, conv.out_channels()));
    ConvGradients cg = conv2d_backward(x, conv, grad_pre);
    auto out = flat.begin() + static_cast<std::ptrdiff_t>(offsets[b]);
    out = std::copy(cg.kernel.data().begin(), cg.kernel.data().end(), out);
    std::copy(cg.bias.begin(), cg.bias.end(), out);
    if (b > 0) {
      Tensor grad_x = slice_channels(grad, 0, in);
      for (std::size_t i = 0; i < grad_x.size(); ++i) grad_x[i] += cg.input[i];
      grad = avg_pool2x2_backward(grad_x);
    }
  }
  return {sl.loss, std::move(sl.probs), Gradients{std::move(flat)}};
}

}  // namespace symk
