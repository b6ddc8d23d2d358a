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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "symk/data.hpp"
#include "symk/network.hpp"

namespace symk {

/*
 * Checkpoint layout, all integers and floats little-endian:
 *
 *   "SYMK1"                      5 bytes
 *   level                        1 byte (0..4)
 *   per layer, blocks first, head last:
 *     count                      u64
 *     values                     count x f64, flat-view order
 */
inline constexpr std::string_view kCheckpointMagic = "SYMK1";

namespace detail {

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_checkpoint(const Network& net) {
  std::vector<std::uint8_t> out(kCheckpointMagic.begin(), kCheckpointMagic.end());
  out.push_back(static_cast<std::uint8_t>(to_int(net.level())));
  const auto flat = net.parameters();
  std::size_t at = 0;
  for (std::size_t count : net.layer_parameter_counts()) {
    detail::put_u64(out, count);
    for (std::size_t i = 0; i < count; ++i) detail::put_u64(out, std::bit_cast<std::uint64_t>(flat[at++]));
  }
  return out;
}

/**
 * Rebuilds a network from checkpoint bytes. The block count and growth are
 * recovered from the record counts; input channels (3), classes (10) and the
 * input side length are not stored and come from the caller.
 */
inline Network decode_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& origin,
                                 std::size_t input_size = 32, std::size_t input_channels = 3,
                                 std::size_t classes = 10) {
  const std::size_t header = kCheckpointMagic.size() + 1;
  if (bytes.size() < header || std::memcmp(bytes.data(), kCheckpointMagic.data(), kCheckpointMagic.size()) != 0) {
    throw IoError(origin, 0, "not a checkpoint (bad magic)");
  }
  if (bytes[header - 1] > kMaxSymmetryLevel) {
    throw IoError(origin, header - 1, "invalid symmetry level byte " + std::to_string(bytes[header - 1]));
  }
  const SymmetryLevel level = symmetry_level(bytes[header - 1]);

  std::vector<std::vector<double>> records;
  std::size_t pos = header;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 8) throw IoError(origin, pos, "truncated record header");
    const std::uint64_t count = detail::get_u64(bytes.data() + pos);
    pos += 8;
    if (count > (bytes.size() - pos) / 8) throw IoError(origin, pos, "truncated record: expected " +
                                                                         std::to_string(count) + " values");
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i, pos += 8) {
      values[i] = std::bit_cast<double>(detail::get_u64(bytes.data() + pos));
    }
    records.push_back(std::move(values));
  }
  if (records.size() < 2) throw IoError(origin, pos, "checkpoint needs at least one block and a head");

  const std::size_t per_out = input_channels * free_param_count(level) + 1;
  if (records[0].size() % per_out != 0) throw IoError(origin, header, "first block size is inconsistent with level");
  NetworkConfig config{level, input_channels, input_size, records[0].size() / per_out, records.size() - 1, classes};
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw IoError(origin, header, std::string("inconsistent architecture: ") + e.what());
  }
  Network net(config);
  const auto expected = net.layer_parameter_counts();
  std::vector<double> flat;
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != expected[r]) {
      throw IoError(origin, header, "layer " + std::to_string(r) + " holds " + std::to_string(records[r].size()) +
                                        " values, expected " + std::to_string(expected[r]));
    }
    flat.insert(flat.end(), records[r].begin(), records[r].end());
  }
  net.set_parameters(flat);
  return net;
}

inline void save_checkpoint(const Network& net, const std::filesystem::path& file) {
  const auto bytes = encode_checkpoint(net);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(file.string(), 0, "cannot open checkpoint for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(file.string(), 0, "checkpoint write failed");
}

inline Network load_checkpoint(const std::filesystem::path& file, std::size_t input_size = 32) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError(file.string(), 0, "cannot open checkpoint");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, file.string(), input_size);
}

}  // namespace symk
