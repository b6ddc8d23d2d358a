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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symk/tensor.hpp"

namespace symk {

/**
 * How strongly a 3x3 kernel is tied.
 *
 *   0: a b c / d e f / g h i   (unconstrained)
 *   1: a b a / d e d / g h g   (mirror across the vertical axis)
 *   2: a b a / d e d / a b a   (both mirror axes)
 *   3: a b a / b e b / a b a   (full square symmetry)
 *   4: a a a / a e a / a a a   (border ring + center)
 */
enum class SymmetryLevel : std::uint8_t { L0 = 0, L1 = 1, L2 = 2, L3 = 3, L4 = 4 };

inline constexpr int kMaxSymmetryLevel = 4;

inline SymmetryLevel symmetry_level(int level) {
  if (level < 0 || level > kMaxSymmetryLevel) {
    throw std::out_of_range("symmetry level must be in 0..4, got " + std::to_string(level));
  }
  return static_cast<SymmetryLevel>(level);
}

constexpr int to_int(SymmetryLevel level) noexcept { return static_cast<int>(level); }

inline constexpr std::array<SymmetryLevel, 5> kAllLevels = {SymmetryLevel::L0, SymmetryLevel::L1, SymmetryLevel::L2,
                                                            SymmetryLevel::L3, SymmetryLevel::L4};

/// Partition of the 9 kernel positions (row-major) into tie classes.
/// Class indices follow the alphabetical order of the letters they carry.
struct TiePattern {
  std::array<std::uint8_t, 9> class_of;
  std::size_t class_count;

  /// Row-major positions belonging to `cls`, in ascending order.
  constexpr std::array<std::uint8_t, 9> positions(std::size_t cls, std::size_t& count) const {
    std::array<std::uint8_t, 9> out{};
    count = 0;
    for (std::uint8_t p = 0; p < 9; ++p) {
      if (class_of[p] == cls) out[count++] = p;
    }
    return out;
  }
};

constexpr TiePattern tie_pattern(SymmetryLevel level) {
  switch (level) {
    case SymmetryLevel::L0:
      return {{0, 1, 2, 3, 4, 5, 6, 7, 8}, 9};
    case SymmetryLevel::L1:  // a b d e g h
      return {{0, 1, 0, 2, 3, 2, 4, 5, 4}, 6};
    case SymmetryLevel::L2:  // a b d e
      return {{0, 1, 0, 2, 3, 2, 0, 1, 0}, 4};
    case SymmetryLevel::L3:  // a b e
      return {{0, 1, 0, 1, 2, 1, 0, 1, 0}, 3};
    case SymmetryLevel::L4:  // a e
      return {{0, 0, 0, 0, 1, 0, 0, 0, 0}, 2};
  }
  return {{0, 1, 2, 3, 4, 5, 6, 7, 8}, 9};
}

constexpr std::size_t free_param_count(SymmetryLevel level) { return tie_pattern(level).class_count; }

/// Free-parameter letter names, e.g. "abdegh" for level 1.
inline std::string_view free_param_names(SymmetryLevel level) {
  switch (level) {
    case SymmetryLevel::L0: return "abcdefghi";
    case SymmetryLevel::L1: return "abdegh";
    case SymmetryLevel::L2: return "abde";
    case SymmetryLevel::L3: return "abe";
    case SymmetryLevel::L4: return "ae";
  }
  return "";
}

template <class Scalar>
using Kernel3x3 = std::array<Scalar, 9>;

/// Full 3x3 kernel (row-major) with every position set to its tie class's parameter.
template <class Scalar>
Kernel3x3<Scalar> expand_kernel(std::span<const Scalar> params, SymmetryLevel level) {
  const TiePattern pattern = tie_pattern(level);
  if (params.size() != pattern.class_count) {
    throw ShapeError("expand_kernel: level " + std::to_string(to_int(level)) + " takes " +
                     std::to_string(pattern.class_count) + " parameters, got " + std::to_string(params.size()));
  }
  Kernel3x3<Scalar> kernel{};
  for (std::size_t p = 0; p < 9; ++p) kernel[p] = params[pattern.class_of[p]];
  return kernel;
}

inline Kernel3x3<double> expand_kernel(const std::vector<double>& params, SymmetryLevel level) {
  return expand_kernel<double>(std::span<const double>(params), level);
}

/// Adjoint of expand_kernel: sums the full-kernel gradient over each tie class.
template <class Scalar>
std::vector<Scalar> fold_gradient(const Kernel3x3<Scalar>& full_grad, SymmetryLevel level) {
  const TiePattern pattern = tie_pattern(level);
  std::vector<Scalar> folded(pattern.class_count, Scalar{});
  for (std::size_t p = 0; p < 9; ++p) folded[pattern.class_of[p]] += full_grad[p];
  return folded;
}

template <class Scalar>
bool is_symmetric(const Kernel3x3<Scalar>& kernel, SymmetryLevel level) {
  const TiePattern pattern = tie_pattern(level);
  std::array<int, 9> first{-1, -1, -1, -1, -1, -1, -1, -1, -1};
  for (std::size_t p = 0; p < 9; ++p) {
    const std::size_t cls = pattern.class_of[p];
    if (first[cls] < 0) {
      first[cls] = static_cast<int>(p);
    } else if (!(kernel[p] == kernel[static_cast<std::size_t>(first[cls])])) {
      return false;
    }
  }
  return true;
}

/// The eight automorphisms of a square grid (dihedral group of order 8).
/// Non-square grids support only the first four.
enum class GridTransform : std::uint8_t {
  identity,
  hflip,          // reverse columns
  vflip,          // reverse rows
  rot180,         // hflip then vflip
  rot90,          // counterclockwise quarter turn
  rot270,         // clockwise quarter turn
  transpose,      // main-diagonal mirror
  antitranspose,  // anti-diagonal mirror
};

inline std::string_view name(GridTransform t) {
  switch (t) {
    case GridTransform::identity: return "identity";
    case GridTransform::hflip: return "hflip";
    case GridTransform::vflip: return "vflip";
    case GridTransform::rot180: return "rot180";
    case GridTransform::rot90: return "rot90";
    case GridTransform::rot270: return "rot270";
    case GridTransform::transpose: return "transpose";
    case GridTransform::antitranspose: return "antitranspose";
  }
  return "?";
}

constexpr bool requires_square(GridTransform t) {
  return t == GridTransform::rot90 || t == GridTransform::rot270 || t == GridTransform::transpose ||
         t == GridTransform::antitranspose;
}

struct GridIndex {
  std::size_t row;
  std::size_t col;
};

/// Source cell read by output cell (row, col) when applying `t` to an rows x cols grid.
/// For the square-only transforms the grid must satisfy rows == cols.
constexpr GridIndex source_index(GridTransform t, std::size_t row, std::size_t col, std::size_t rows,
                                 std::size_t cols) {
  const std::size_t n = rows;  // square transforms
  switch (t) {
    case GridTransform::identity: return {row, col};
    case GridTransform::hflip: return {row, cols - 1 - col};
    case GridTransform::vflip: return {rows - 1 - row, col};
    case GridTransform::rot180: return {rows - 1 - row, cols - 1 - col};
    case GridTransform::rot90: return {col, n - 1 - row};
    case GridTransform::rot270: return {n - 1 - col, row};
    case GridTransform::transpose: return {col, row};
    case GridTransform::antitranspose: return {n - 1 - col, n - 1 - row};
  }
  return {row, col};
}

template <class Scalar>
Kernel3x3<Scalar> transform_kernel(const Kernel3x3<Scalar>& kernel, GridTransform t) {
  Kernel3x3<Scalar> out{};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      const GridIndex src = source_index(t, r, c, 3, 3);
      out[r * 3 + c] = kernel[src.row * 3 + src.col];
    }
  }
  return out;
}

/// Grid transforms under which every kernel of `level` is unchanged, hence
/// under which a network built from such kernels and global pooling is invariant.
inline std::vector<GridTransform> symmetry_group(SymmetryLevel level) {
  using enum GridTransform;
  switch (level) {
    case SymmetryLevel::L0: return {identity};
    case SymmetryLevel::L1: return {identity, hflip};
    case SymmetryLevel::L2: return {identity, hflip, vflip, rot180};
    case SymmetryLevel::L3:
    case SymmetryLevel::L4: return {identity, hflip, vflip, rot180, rot90, rot270, transpose, antitranspose};
  }
  return {identity};
}

/**
 * Tied free parameters of one convolution layer.
 *
 * `values` has shape (out_channels, in_channels, free_param_count(level)); the
 * full 3x3 kernels are never stored.
 */
class SymmetricKernelParams {
 public:
  SymmetricKernelParams(SymmetryLevel level, std::size_t out_channels, std::size_t in_channels)
      : level_(level),
        values_(Tensor::zeros({out_channels, in_channels, free_param_count(level)})) {}

  SymmetricKernelParams(SymmetryLevel level, Tensor values) : level_(level), values_(std::move(values)) {
    if (values_.rank() != 3 || values_.extent(2) != free_param_count(level)) {
      throw ShapeError("SymmetricKernelParams: values shape " + Tensor::describe(values_.shape()) +
                       " does not match level " + std::to_string(to_int(level)));
    }
  }

  SymmetryLevel level() const noexcept { return level_; }
  std::size_t out_channels() const { return values_.extent(0); }
  std::size_t in_channels() const { return values_.extent(1); }
  std::size_t per_slice() const { return values_.extent(2); }

  const Tensor& values() const noexcept { return values_; }
  Tensor& values() noexcept { return values_; }

  std::span<const double> slice(std::size_t out, std::size_t in) const {
    return values_.data().subspan((out * in_channels() + in) * per_slice(), per_slice());
  }
  std::span<double> slice(std::size_t out, std::size_t in) {
    return values_.data().subspan((out * in_channels() + in) * per_slice(), per_slice());
  }

  Kernel3x3<double> expanded(std::size_t out, std::size_t in) const {
    return expand_kernel<double>(slice(out, in), level_);
  }

 private:
  SymmetryLevel level_;
  Tensor values_;
};

}  // namespace symk
