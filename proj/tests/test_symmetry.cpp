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

#include "symk/random.hpp"
#include "symk/symmetry.hpp"

namespace symk {
namespace {

using K = Kernel3x3<double>;

std::vector<double> random_params(SymmetryLevel level, Rng& rng) {
  std::vector<double> p(free_param_count(level));
  for (double& v : p) v = rng.uniform(-1, 1);
  return p;
}

TEST(Symmetry, FreeParameterCounts) {
  EXPECT_EQ(free_param_count(SymmetryLevel::L0), 9u);
  EXPECT_EQ(free_param_count(SymmetryLevel::L1), 6u);
  EXPECT_EQ(free_param_count(SymmetryLevel::L2), 4u);
  EXPECT_EQ(free_param_count(SymmetryLevel::L3), 3u);
  EXPECT_EQ(free_param_count(SymmetryLevel::L4), 2u);
  for (auto level : kAllLevels) EXPECT_EQ(free_param_names(level).size(), free_param_count(level));
}

TEST(Symmetry, LevelValidation) {
  EXPECT_EQ(symmetry_level(3), SymmetryLevel::L3);
  EXPECT_THROW(symmetry_level(5), std::out_of_range);
  EXPECT_THROW(symmetry_level(-1), std::out_of_range);
}

TEST(Symmetry, TiePatternsPartitionTheGrid) {
  for (auto level : kAllLevels) {
    const TiePattern p = tie_pattern(level);
    std::size_t covered = 0;
    for (std::size_t cls = 0; cls < p.class_count; ++cls) {
      std::size_t n = 0;
      p.positions(cls, n);
      EXPECT_GT(n, 0u);
      covered += n;
    }
    EXPECT_EQ(covered, 9u);
  }
}

TEST(Symmetry, ExpandKernelForms) {
  EXPECT_EQ(expand_kernel({1, 2, 3, 4, 5, 6}, SymmetryLevel::L1), (K{1, 2, 1, 3, 4, 3, 5, 6, 5}));
  EXPECT_EQ(expand_kernel({1, 2, 3}, SymmetryLevel::L3), (K{1, 2, 1, 2, 3, 2, 1, 2, 1}));
  EXPECT_EQ(expand_kernel({1, 2, 3, 4, 5, 6, 7, 8, 9}, SymmetryLevel::L0), (K{1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(expand_kernel({1, 2, 3, 4}, SymmetryLevel::L2), (K{1, 2, 1, 3, 4, 3, 1, 2, 1}));
  EXPECT_EQ(expand_kernel({1, 2}, SymmetryLevel::L4), (K{1, 1, 1, 1, 2, 1, 1, 1, 1}));
  EXPECT_THROW(expand_kernel({1, 2, 3}, SymmetryLevel::L1), ShapeError);
}

TEST(Symmetry, FoldGradientSumsClasses) {
  const K ones{1, 1, 1, 1, 1, 1, 1, 1, 1};
  EXPECT_EQ(fold_gradient(ones, SymmetryLevel::L1), (std::vector<double>{2, 1, 2, 1, 2, 1}));
  EXPECT_EQ(fold_gradient(ones, SymmetryLevel::L2), (std::vector<double>{4, 2, 2, 1}));
  EXPECT_EQ(fold_gradient(ones, SymmetryLevel::L3), (std::vector<double>{4, 4, 1}));
  EXPECT_EQ(fold_gradient(ones, SymmetryLevel::L4), (std::vector<double>{8, 1}));
  EXPECT_EQ(fold_gradient(K{1, 2, 3, 4, 5, 6, 7, 8, 9}, SymmetryLevel::L0),
            (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

TEST(Symmetry, IsSymmetric) {
  const K k{1, 2, 1, 3, 4, 3, 5, 6, 5};
  EXPECT_TRUE(is_symmetric(k, SymmetryLevel::L1));
  EXPECT_FALSE(is_symmetric(k, SymmetryLevel::L2));
  EXPECT_TRUE(is_symmetric(K{9, 1, 4, 2, 7, 3, 8, 5, 6}, SymmetryLevel::L0));
}

TEST(Symmetry, GroupSizes) {
  EXPECT_EQ(symmetry_group(SymmetryLevel::L0), std::vector<GridTransform>{GridTransform::identity});
  EXPECT_EQ(symmetry_group(SymmetryLevel::L1),
            (std::vector<GridTransform>{GridTransform::identity, GridTransform::hflip}));
  EXPECT_EQ(symmetry_group(SymmetryLevel::L2).size(), 4u);
  EXPECT_EQ(symmetry_group(SymmetryLevel::L3).size(), 8u);
  EXPECT_EQ(symmetry_group(SymmetryLevel::L4).size(), 8u);
}

TEST(Symmetry, GridTransformsAreDistinctPermutations) {
  const K ramp{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<K> images;
  for (auto t : symmetry_group(SymmetryLevel::L3)) images.push_back(transform_kernel(ramp, t));
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j) EXPECT_NE(images[i], images[j]);
  // counterclockwise: the top-right corner moves to the top-left
  EXPECT_EQ(transform_kernel(ramp, GridTransform::rot90)[0], 2.0);
  EXPECT_EQ(transform_kernel(transform_kernel(ramp, GridTransform::rot90), GridTransform::rot90),
            transform_kernel(ramp, GridTransform::rot180));
}

// Properties over random parameters and gradients.

TEST(SymmetryProperty, ExpandFoldAdjointness) {
  Rng rng(11);
  for (auto level : kAllLevels) {
    for (int trial = 0; trial < 2000; ++trial) {
      const auto p = random_params(level, rng);
      K g{};
      for (double& v : g) v = rng.uniform(-1, 1);
      const K k = expand_kernel(p, level);
      const auto f = fold_gradient(g, level);
      double lhs = 0, rhs = 0;
      for (std::size_t i = 0; i < 9; ++i) lhs += k[i] * g[i];
      for (std::size_t i = 0; i < p.size(); ++i) rhs += p[i] * f[i];
      ASSERT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

TEST(SymmetryProperty, ExpandedKernelsAreFixedByTheirGroup) {
  Rng rng(12);
  for (auto level : kAllLevels) {
    for (int trial = 0; trial < 200; ++trial) {
      const K k = expand_kernel(random_params(level, rng), level);
      ASSERT_TRUE(is_symmetric(k, level));
      for (auto t : symmetry_group(level)) ASSERT_EQ(transform_kernel(k, t), k);
    }
  }
}

TEST(SymmetryProperty, LevelFourIsFixedByBorderPermutations) {
  Rng rng(13);
  const std::array<std::size_t, 8> border{0, 1, 2, 3, 5, 6, 7, 8};
  for (int trial = 0; trial < 100; ++trial) {
    const K k = expand_kernel(random_params(SymmetryLevel::L4, rng), SymmetryLevel::L4);
    K shuffled = k;
    for (std::size_t i = 7; i > 0; --i) std::swap(shuffled[border[i]], shuffled[border[rng.below(i + 1)]]);
    ASSERT_EQ(shuffled, k);
  }
}

TEST(SymmetryProperty, LevelsAreNested) {
  Rng rng(14);
  for (int l = 1; l <= kMaxSymmetryLevel; ++l) {
    const auto upper = symmetry_level(l), lower = symmetry_level(l - 1);
    for (int trial = 0; trial < 100; ++trial) ASSERT_TRUE(is_symmetric(expand_kernel(random_params(upper, rng), upper), lower));
  }
}

TEST(SymmetryProperty, LevelZeroKernelsAreGenerallyNotMirrorSymmetric) {
  Rng rng(15);
  const K k = expand_kernel(random_params(SymmetryLevel::L0, rng), SymmetryLevel::L0);
  EXPECT_NE(transform_kernel(k, GridTransform::hflip), k);
}

TEST(Symmetry, HorizontalLevelKeepsTwoThirdsOfTheParameters) {
  EXPECT_EQ(3 * free_param_count(SymmetryLevel::L1), 2 * free_param_count(SymmetryLevel::L0));
}

}  // namespace
}  // namespace symk
