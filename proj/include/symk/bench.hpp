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
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "symk/conv.hpp"
#include "symk/random.hpp"
#include "symk/symmetry.hpp"
#include "symk/tensor.hpp"

namespace symk {

/// A double that counts how many multiplications it takes part in.
struct CountingScalar {
  double value = 0.0;

  static std::uint64_t& multiplies() {
    static thread_local std::uint64_t count = 0;
    return count;
  }

  CountingScalar() = default;
  CountingScalar(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  CountingScalar& operator+=(const CountingScalar& o) {
    value += o.value;
    return *this;
  }
  friend CountingScalar operator+(CountingScalar a, const CountingScalar& b) { return a += b; }
  friend CountingScalar operator*(const CountingScalar& a, const CountingScalar& b) {
    ++multiplies();
    return {a.value * b.value};
  }
  friend bool operator==(const CountingScalar& a, const CountingScalar& b) { return a.value == b.value; }
};

/// Multiplications per output pixel per (out, in) channel pair in the forward pass.
inline double forward_multiplies_per_slice(SymmetryLevel level, const ConvGeometry& g = {4, 3, 6, 6}) {
  const std::size_t K = free_param_count(level);
  Rng rng(17);
  std::vector<CountingScalar> input(g.in_channels * g.plane());
  std::vector<CountingScalar> weights(g.out_channels * g.in_channels * K);
  std::vector<CountingScalar> bias(g.out_channels);
  for (auto& v : input) v = rng.uniform(-1, 1);
  for (auto& v : weights) v = rng.uniform(-1, 1);
  std::vector<CountingScalar> out(g.out_channels * g.plane());
  CountingScalar::multiplies() = 0;
  tied_conv_forward<CountingScalar>(input, g, weights, bias, level, out);
  return static_cast<double>(CountingScalar::multiplies()) /
         static_cast<double>(g.out_channels * g.in_channels * g.plane());
}

/// Same, for the reverse pass (input gradient and parameter gradient each).
inline double backward_multiplies_per_slice(SymmetryLevel level, const ConvGeometry& g = {4, 3, 6, 6}) {
  const std::size_t K = free_param_count(level);
  Rng rng(18);
  std::vector<CountingScalar> input(g.in_channels * g.plane()), grad_out(g.out_channels * g.plane());
  std::vector<CountingScalar> weights(g.out_channels * g.in_channels * K);
  for (auto& v : input) v = rng.uniform(-1, 1);
  for (auto& v : grad_out) v = rng.uniform(-1, 1);
  for (auto& v : weights) v = rng.uniform(-1, 1);
  std::vector<CountingScalar> gi(input.size()), gw(weights.size()), gb(g.out_channels);
  CountingScalar::multiplies() = 0;
  tied_conv_backward<CountingScalar>(input, g, weights, level, grad_out, gi, gw, gb);
  return static_cast<double>(CountingScalar::multiplies()) /
         static_cast<double>(g.out_channels * g.in_channels * g.plane());
}

struct BenchRow {
  SymmetryLevel level;
  double median_ns_per_output;  // per output element (out channel x pixel)
  double median_ns_total;
  double multiplies_per_slice;
};

/// Median forward time of a (93,8,8) -> 30 convolution per level. Levels are
/// timed round-robin inside each repetition so drift affects all of them alike.
inline std::vector<BenchRow> bench_forward(const std::vector<SymmetryLevel>& levels, std::size_t repetitions,
                                           const ConvGeometry& g = {93, 30, 8, 8}, std::uint64_t seed = 5) {
  Rng rng(seed);
  Tensor input = Tensor::zeros({g.in_channels, g.height, g.width});
  for (double& v : input.data()) v = rng.uniform01();
  std::vector<ConvLayer> layers;
  for (SymmetryLevel level : levels) {
    ConvLayer layer(level, g.in_channels, g.out_channels);
    for (double& v : layer.kernels.values().data()) v = rng.uniform(-0.1, 0.1);
    layers.push_back(std::move(layer));
  }
  std::vector<std::vector<double>> samples(levels.size());
  double sink = 0.0;
  for (std::size_t l = 0; l < layers.size(); ++l) sink += conv2d_forward(input, layers[l])[0];  // warm-up
  for (std::size_t r = 0; r < repetitions; ++r) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto t0 = std::chrono::steady_clock::now();
      const Tensor out = conv2d_forward(input, layers[l]);
      const auto t1 = std::chrono::steady_clock::now();
      sink += out[0];
      samples[l].push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
  }
  volatile double keep = sink;
  (void)keep;
  std::vector<BenchRow> rows;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    auto& s = samples[l];
    std::sort(s.begin(), s.end());
    const double median = s.size() % 2 ? s[s.size() / 2] : 0.5 * (s[s.size() / 2 - 1] + s[s.size() / 2]);
    rows.push_back({levels[l], median / static_cast<double>(g.out_channels * g.plane()), median,
                    forward_multiplies_per_slice(levels[l])});
  }
  return rows;
}

}  // namespace symk
