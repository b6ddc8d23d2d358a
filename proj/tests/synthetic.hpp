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

// Small learnable datasets in the CIFAR-10 binary layout, for exercising the
// training loop and CLI without the real archive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>

#include "symk/data.hpp"
#include "symk/random.hpp"

namespace symk::testing {

/// Class c tints each colour plane by a fixed per-class offset and adds noise;
/// pixel values are quantized to bytes so they survive a write/load round trip.
inline Dataset synthetic_cifar(std::size_t count, std::uint64_t seed, Split split = Split::train) {
  Rng rng(derive_seed(seed, 0x5e7));
  Dataset ds;
  ds.split = split;
  for (std::size_t n = 0; n < count; ++n) {
    const auto label = static_cast<std::uint8_t>(rng.below(kCifarClasses));
    Tensor image = Tensor::zeros({3, kCifarSide, kCifarSide});
    for (std::size_t c = 0; c < 3; ++c) {
      const double tint = 0.08 * static_cast<double>((label * (c + 3) + c) % 7) - 0.24;
      for (double& v : image.channel(c)) {
        const double x = std::clamp(0.5 + tint + 0.15 * (rng.uniform01() - 0.5), 0.0, 1.0);
        v = std::round(x * 255.0) / 255.0;
      }
    }
    ds.images.push_back(std::move(image));
    ds.labels.push_back(label);
  }
  return ds;
}

/// Writes data_batch_{1..5}.bin (per_file records each) and test_batch.bin.
inline void write_synthetic_cifar_dir(const std::filesystem::path& dir, std::size_t per_file, std::size_t test_count,
                                      std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (std::size_t f = 0; f < kCifarTrainFiles.size(); ++f) {
    write_cifar_batch(dir / kCifarTrainFiles[f], synthetic_cifar(per_file, seed * 31 + f));
  }
  write_cifar_batch(dir / kCifarTestFile, synthetic_cifar(test_count, seed * 31 + 99, Split::test));
}

}  // namespace symk::testing
