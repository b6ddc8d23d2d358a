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
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symk {

/// Raised for any shape or length contract violation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Dense row-major array of doubles, rank 1 to 4, last axis fastest.
 *
 * Images are (channels, height, width); batches prepend a batch axis.
 * Every operation in the library returns a freshly owned tensor; there are
 * no views and no broadcasting.
 */
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;

  static Tensor zeros(Shape shape) {
    const std::size_t n = checked_size(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
  }

  static Tensor from_values(Shape shape, std::vector<double> values) {
    const std::size_t n = checked_size(shape);
    if (values.size() != n) {
      std::ostringstream msg;
      msg << "from_values: shape " << describe(shape) << " holds " << n << " elements, got " << values.size();
      throw ShapeError(msg.str());
    }
    return Tensor(std::move(shape), std::move(values));
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  // (c, h, w) accessors for rank-3 feature volumes.
  std::size_t channels() const { return require_rank3().shape_[0]; }
  std::size_t height() const { return require_rank3().shape_[1]; }
  std::size_t width() const { return require_rank3().shape_[2]; }

  double at(std::size_t c, std::size_t h, std::size_t w) const { return data_[offset(c, h, w)]; }
  double& at(std::size_t c, std::size_t h, std::size_t w) { return data_[offset(c, h, w)]; }

  std::size_t offset(std::size_t c, std::size_t h, std::size_t w) const {
    return (c * shape_[1] + h) * shape_[2] + w;
  }

  /// Contiguous view of channel `c` of a rank-3 tensor.
  std::span<const double> channel(std::size_t c) const {
    const std::size_t plane = shape_[1] * shape_[2];
    return std::span<const double>(data_).subspan(c * plane, plane);
  }
  std::span<double> channel(std::size_t c) {
    const std::size_t plane = shape_[1] * shape_[2];
    return std::span<double>(data_).subspan(c * plane, plane);
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

  static std::string describe(const Shape& shape) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? "," : "") << shape[i];
    out << ')';
    return out.str();
  }

 private:
  Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {}

  static std::size_t checked_size(const Shape& shape) {
    if (shape.empty() || shape.size() > 4) throw ShapeError("tensor rank must be 1..4, got shape " + describe(shape));
    for (std::size_t e : shape) {
      if (e == 0) throw ShapeError("tensor extents must be positive, got shape " + describe(shape));
    }
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }

  const Tensor& require_rank3() const {
    if (shape_.size() != 3) throw ShapeError("expected a (C,H,W) tensor, got shape " + describe(shape_));
    return *this;
  }

  Shape shape_;
  std::vector<double> data_;
};

inline Tensor zeros(Tensor::Shape shape) { return Tensor::zeros(std::move(shape)); }

inline Tensor from_values(Tensor::Shape shape, std::vector<double> values) {
  return Tensor::from_values(std::move(shape), std::move(values));
}

/// Stacks `b`'s channels after `a`'s. Both must be (C,H,W) with equal H and W.
inline Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.rank() != 3 || b.rank() != 3 || a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError("concat_channels: incompatible shapes " + Tensor::describe(a.shape()) + " and " +
                     Tensor::describe(b.shape()));
  }
  std::vector<double> values;
  values.reserve(a.size() + b.size());
  values.insert(values.end(), a.data().begin(), a.data().end());
  values.insert(values.end(), b.data().begin(), b.data().end());
  return Tensor::from_values({a.channels() + b.channels(), a.height(), a.width()}, std::move(values));
}

/// Copies channels [first, first + count) of a (C,H,W) tensor.
inline Tensor slice_channels(const Tensor& t, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > t.channels()) {
    throw ShapeError("slice_channels: range out of bounds for shape " + Tensor::describe(t.shape()));
  }
  const std::size_t plane = t.height() * t.width();
  auto begin = t.data().begin() + static_cast<std::ptrdiff_t>(first * plane);
  return Tensor::from_values({count, t.height(), t.width()},
                             std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * plane)));
}

inline bool all_finite(const Tensor& t) {
  for (double v : t.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace symk
