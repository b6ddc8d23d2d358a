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

#include "symk/symmetry.hpp"
#include "symk/tensor.hpp"

namespace symk {

/// Applies a grid transform to every channel of a (C,H,W) tensor.
inline Tensor apply_transform(const Tensor& image, GridTransform t) {
  if (image.rank() != 3) throw ShapeError("grid transforms need a (C,H,W) tensor, got " + Tensor::describe(image.shape()));
  const std::size_t rows = image.height();
  const std::size_t cols = image.width();
  if (requires_square(t) && rows != cols) {
    throw ShapeError(std::string(name(t)) + " requires a square image, got " + Tensor::describe(image.shape()));
  }
  Tensor out = Tensor::zeros(image.shape());
  for (std::size_t c = 0; c < image.channels(); ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < cols; ++k) {
        const GridIndex src = source_index(t, r, k, rows, cols);
        out.at(c, r, k) = image.at(c, src.row, src.col);
      }
    }
  }
  return out;
}

inline Tensor hflip(const Tensor& image) { return apply_transform(image, GridTransform::hflip); }
inline Tensor vflip(const Tensor& image) { return apply_transform(image, GridTransform::vflip); }
inline Tensor rot90(const Tensor& image) { return apply_transform(image, GridTransform::rot90); }

}  // namespace symk
