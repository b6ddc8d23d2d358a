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

// Writes a small CIFAR-10-format directory: make_synthetic_cifar DIR [PER_FILE] [TEST] [SEED]

#include <cstdlib>
#include <iostream>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic_cifar DIR [PER_FILE] [TEST] [SEED]\n";
    return 2;
  }
  const std::size_t per_file = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 40;
  const std::size_t test = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 100;
  const std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;
  symk::testing::write_synthetic_cifar_dir(argv[1], per_file, test, seed);
  return 0;
}
