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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "symk/random.hpp"
#include "symk/tensor.hpp"

namespace symk {

/// Raised for unreadable, missing or malformed files.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, std::uint64_t offset, const std::string& what)
      : std::runtime_error(path + " (offset " + std::to_string(offset) + "): " + what),
        path_(std::move(path)),
        offset_(offset) {}

  const std::string& path() const noexcept { return path_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::string path_;
  std::uint64_t offset_;
};

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarPixels = 3 * kCifarSide * kCifarSide;
inline constexpr std::size_t kCifarRecordBytes = 1 + kCifarPixels;
inline constexpr std::size_t kCifarClasses = 10;

enum class Split : std::uint8_t { train, test };

struct Dataset {
  std::vector<Tensor> images;  // (3, 32, 32), values in [0, 1]
  std::vector<std::uint8_t> labels;
  Split split = Split::train;

  std::size_t size() const noexcept { return images.size(); }
};

/// Decodes one 3073-byte record: label byte, then R, G, B planes row-major.
inline Tensor decode_cifar_pixels(const std::uint8_t* pixels) {
  std::vector<double> values(kCifarPixels);
  for (std::size_t i = 0; i < kCifarPixels; ++i) values[i] = static_cast<double>(pixels[i]) / 255.0;
  return Tensor::from_values({3, kCifarSide, kCifarSide}, std::move(values));
}

inline std::array<std::uint8_t, kCifarRecordBytes> encode_cifar_record(const Tensor& image, std::uint8_t label) {
  if (image.shape() != Tensor::Shape{3, kCifarSide, kCifarSide}) {
    throw ShapeError("encode_cifar_record: expected (3,32,32), got " + Tensor::describe(image.shape()));
  }
  std::array<std::uint8_t, kCifarRecordBytes> record{};
  record[0] = label;
  for (std::size_t i = 0; i < kCifarPixels; ++i) {
    const double v = std::round(std::clamp(image[i], 0.0, 1.0) * 255.0);
    record[1 + i] = static_cast<std::uint8_t>(v);
  }
  return record;
}

inline Dataset load_cifar_batch(const std::filesystem::path& file, Split split) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError(file.string(), 0, "cannot open CIFAR-10 batch file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t whole = bytes.size() / kCifarRecordBytes;
  if (bytes.size() % kCifarRecordBytes != 0) {
    throw IoError(file.string(), whole * kCifarRecordBytes,
                  "truncated record: file length " + std::to_string(bytes.size()) + " is not a multiple of " +
                      std::to_string(kCifarRecordBytes));
  }
  Dataset ds;
  ds.split = split;
  ds.images.reserve(whole);
  ds.labels.reserve(whole);
  for (std::size_t r = 0; r < whole; ++r) {
    const std::uint8_t* rec = bytes.data() + r * kCifarRecordBytes;
    if (rec[0] >= kCifarClasses) {
      throw IoError(file.string(), r * kCifarRecordBytes, "label byte " + std::to_string(rec[0]) + " is not in 0..9");
    }
    ds.labels.push_back(rec[0]);
    ds.images.push_back(decode_cifar_pixels(rec + 1));
  }
  return ds;
}

inline void write_cifar_batch(const std::filesystem::path& file, const Dataset& ds) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(file.string(), 0, "cannot open for writing");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto rec = encode_cifar_record(ds.images[i], ds.labels[i]);
    out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
  }
  if (!out) throw IoError(file.string(), 0, "write failed");
}

inline void append(Dataset& into, Dataset&& from) {
  into.images.insert(into.images.end(), std::make_move_iterator(from.images.begin()),
                     std::make_move_iterator(from.images.end()));
  into.labels.insert(into.labels.end(), from.labels.begin(), from.labels.end());
}

struct CifarSplits {
  Dataset train;
  Dataset test;
};

inline constexpr std::array<const char*, 5> kCifarTrainFiles = {"data_batch_1.bin", "data_batch_2.bin",
                                                                 "data_batch_3.bin", "data_batch_4.bin",
                                                                 "data_batch_5.bin"};
inline constexpr const char* kCifarTestFile = "test_batch.bin";

/// Loads the binary distribution: data_batch_{1..5}.bin and test_batch.bin.
inline CifarSplits load_cifar10(const std::filesystem::path& dir) {
  CifarSplits splits;
  splits.train.split = Split::train;
  for (const char* name : kCifarTrainFiles) append(splits.train, load_cifar_batch(dir / name, Split::train));
  splits.test = load_cifar_batch(dir / kCifarTestFile, Split::test);
  return splits;
}

inline Dataset load_cifar10_test(const std::filesystem::path& dir) {
  return load_cifar_batch(dir / kCifarTestFile, Split::test);
}

/// First `n` examples after a seeded shuffle; the whole set when n >= size.
inline Dataset seeded_subset(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  if (n >= ds.size()) return ds;
  Rng rng(derive_seed(seed, 0x5b5e7));
  const auto perm = random_permutation(ds.size(), rng);
  Dataset out;
  out.split = ds.split;
  out.images.reserve(n);
  out.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.images.push_back(ds.images[perm[i]]);
    out.labels.push_back(ds.labels[perm[i]]);
  }
  return out;
}

struct BatchPlan {
  std::uint64_t seed = 0;
  std::size_t batch_size = 1280;
};

/// Permutation for `epoch`, a pure function of (seed, epoch).
inline std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  Rng rng(derive_seed(seed, 0xe90c0000ULL + epoch));
  return random_permutation(n, rng);
}

/// Shuffled indices cut into consecutive batches; the last batch may be short.
inline std::vector<std::vector<std::size_t>> minibatches(const Dataset& ds, const BatchPlan& plan, std::size_t epoch) {
  if (ds.size() == 0) throw std::invalid_argument("minibatches: empty dataset");
  if (plan.batch_size == 0) throw std::invalid_argument("minibatches: batch size must be positive");
  const auto perm = epoch_permutation(ds.size(), plan.seed, epoch);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t first = 0; first < perm.size(); first += plan.batch_size) {
    const std::size_t last = std::min(perm.size(), first + plan.batch_size);
    batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(first),
                         perm.begin() + static_cast<std::ptrdiff_t>(last));
  }
  return batches;
}

}  // namespace symk
