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

#include <gtest/gtest.h>

#include <cmath>

#include "symk/network.hpp"
#include "symk/transforms.hpp"
#include "symk/verify.hpp"

namespace symk {
namespace {

TEST(Network, BlockShapesFollowTheDenseGrowth) {
  const Network net = make_network(NetworkConfig::cifar(SymmetryLevel::L1), 1);
  Rng rng(1);
  const ForwardTrace t = forward_trace(net, verify::random_tensor({3, 32, 32}, rng, 0, 1));
  const std::size_t in_channels[] = {3, 33, 63, 93};
  const std::size_t sides[] = {32, 16, 8, 4};
  for (std::size_t b = 0; b < 4; ++b) {
    EXPECT_EQ(t.block_inputs[b].shape(), (Tensor::Shape{in_channels[b], sides[b], sides[b]}));
    EXPECT_EQ(t.pre_activations[b].shape(), (Tensor::Shape{30, sides[b], sides[b]}));
  }
  EXPECT_EQ(t.features.shape(), Tensor::Shape{123});
  EXPECT_EQ(t.logits.shape(), Tensor::Shape{10});
}

TEST(Network, RejectsWrongImageShape) {
  const Network net = make_network(NetworkConfig::shrunken(SymmetryLevel::L0), 1);
  EXPECT_THROW(network_forward(net, zeros({3, 9, 9})), ShapeError);
  EXPECT_THROW(network_forward(net, zeros({1, 8, 8})), ShapeError);
}

TEST(Network, ZeroHeadGivesUniformPosterior) {
  Network net = make_network(NetworkConfig::shrunken(SymmetryLevel::L2), 3);
  std::fill(net.head().weights.data().begin(), net.head().weights.data().end(), 0.0);
  Rng rng(2);
  const Tensor x = verify::random_tensor({3, 8, 8}, rng, 0, 1);
  const Tensor probs = network_forward(net, x);
  for (double p : probs.data()) EXPECT_NEAR(p, 0.1, 1e-15);
  EXPECT_NEAR(network_backward(net, x, 7).loss, std::log(10.0), 1e-12);
}

TEST(Network, ParametersRoundTripThroughFlatView) {
  Network net = verify::random_network(NetworkConfig::shrunken(SymmetryLevel::L3), 4);
  std::vector<double> flat = net.parameters();
  ASSERT_EQ(flat.size(), count_parameters(net.config()));
  for (double& v : flat) v *= 0.5;
  net.set_parameters(flat);
  EXPECT_EQ(net.parameters(), flat);
  EXPECT_THROW(net.set_parameters(std::vector<double>(flat.size() - 1)), ShapeError);
}

TEST(Network, GlorotInitIsSeededAndBounded) {
  const auto config = NetworkConfig::cifar(SymmetryLevel::L1);
  const Network a = make_network(config, 9), b = make_network(config, 9), c = make_network(config, 10);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_NE(a.parameters(), c.parameters());
  const double limit = std::sqrt(6.0 / (9.0 * (93 + 30)));
  for (double v : a.convs()[3].kernels.values().data()) EXPECT_LE(std::abs(v), limit);
  for (double v : a.convs()[3].bias) EXPECT_EQ(v, 0.0);
}

TEST(NetworkProperty, InvariantUnderTheLevelsGroup) {
  for (auto level : {SymmetryLevel::L1, SymmetryLevel::L2, SymmetryLevel::L3, SymmetryLevel::L4}) {
    const Network net = verify::random_network(NetworkConfig::shrunken(level), 11);
    const auto images = verify::random_images(net.config(), 20, 12);
    for (double e : verify::network_invariance_errors(net, symmetry_group(level), images)) EXPECT_LE(e, 1e-12);
  }
}

TEST(NetworkProperty, LevelZeroIsNotMirrorInvariant) {
  const Network net = verify::random_network(NetworkConfig::shrunken(SymmetryLevel::L0), 13);
  const auto images = verify::random_images(net.config(), 5, 14);
  EXPECT_GT(verify::network_invariance_errors(net, {GridTransform::hflip}, images)[0], 1e-6);
}

TEST(NetworkProperty, MirroredInputGivesIdenticalParameterGradient) {
  const Network net = verify::random_network(NetworkConfig::shrunken(SymmetryLevel::L1), 15);
  Rng rng(16);
  const Tensor x = verify::random_tensor({3, 8, 8}, rng, 0, 1);
  const auto a = network_backward(net, x, 3).gradients.flat;
  const auto b = network_backward(net, hflip(x), 3).gradients.flat;
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  EXPECT_LE(worst, 1e-10);
}

TEST(NetworkBackward, MatchesFiniteDifferencesOnShrunkenNetwork) {
  for (auto level : kAllLevels) {
    const Network net = verify::random_network(NetworkConfig::shrunken(level), 17);
    Rng rng(18);
    const auto r = verify::gradient_check(net, verify::random_tensor({3, 8, 8}, rng, 0, 1), 5);
    EXPECT_LE(r.max_relative_error, 1e-5) << to_int(level);
    EXPECT_GT(r.checked, r.skipped * 10);
  }
}

TEST(ParameterCount, MatchesLayerByLayerEnumeration) {
  for (auto level : kAllLevels) {
    const std::size_t k = free_param_count(level);
    std::size_t expected = 0;
    for (std::size_t in : {3, 33, 63, 93}) expected += 30 * in * k + 30;
    expected += 123 * 10 + 10;
    EXPECT_EQ(count_parameters(NetworkConfig::cifar(level)), expected);
    EXPECT_EQ(make_network(NetworkConfig::cifar(level), 0).parameter_count(), expected);
  }
  EXPECT_EQ(count_parameters(NetworkConfig::cifar(SymmetryLevel::L0)), 53200u);
  EXPECT_EQ(count_parameters(NetworkConfig::cifar(SymmetryLevel::L1)), 35920u);
}

TEST(ParameterCount, StrictlyDecreasingWithExactTwoThirdsConvRatio) {
  for (int l = 1; l <= kMaxSymmetryLevel; ++l) {
    EXPECT_LT(count_parameters(NetworkConfig::cifar(symmetry_level(l))),
              count_parameters(NetworkConfig::cifar(symmetry_level(l - 1))));
  }
  EXPECT_EQ(3 * conv_free_parameter_count(NetworkConfig::cifar(SymmetryLevel::L1)),
            2 * conv_free_parameter_count(NetworkConfig::cifar(SymmetryLevel::L0)));
}

}  // namespace
}  // namespace symk
