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

#include <filesystem>
#include <fstream>
#include <set>

#include "symk/data.hpp"
#include "symk/transforms.hpp"
#include "symk/verify.hpp"
#include "synthetic.hpp"

namespace symk {
namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("symk_test_data_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_bytes(const std::filesystem::path& file, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(file, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TEST(CifarLoader, DecodesLabelAndPlanes) {
  const auto dir = scratch_dir("decode");
  std::vector<std::uint8_t> rec(kCifarRecordBytes, 0);
  rec[0] = 7;
  rec[1] = 255;                     // R(0,0)
  rec[1 + 1024 + 33] = 51;          // G(1,1)
  rec[1 + 2048 + 1023] = 255;       // B(31,31)
  write_bytes(dir / "one.bin", rec);
  const Dataset ds = load_cifar_batch(dir / "one.bin", Split::test);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.labels[0], 7);
  EXPECT_EQ(ds.images[0].at(0, 0, 0), 1.0);
  EXPECT_EQ(ds.images[0].at(1, 1, 1), 0.2);
  EXPECT_EQ(ds.images[0].at(2, 31, 31), 1.0);
  EXPECT_EQ(ds.images[0].at(0, 0, 1), 0.0);
  EXPECT_EQ(ds.split, Split::test);
}

TEST(CifarLoader, ReportsTruncationWithOffset) {
  const auto dir = scratch_dir("truncated");
  std::vector<std::uint8_t> bytes(2 * kCifarRecordBytes + 100, 1);
  write_bytes(dir / "bad.bin", bytes);
  try {
    load_cifar_batch(dir / "bad.bin", Split::train);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.offset(), 2 * kCifarRecordBytes);
    EXPECT_NE(std::string(e.what()).find("bad.bin"), std::string::npos);
  }
}

TEST(CifarLoader, RejectsLabelOutOfRangeAndMissingFiles) {
  const auto dir = scratch_dir("label");
  std::vector<std::uint8_t> bytes(2 * kCifarRecordBytes, 0);
  bytes[kCifarRecordBytes] = 10;
  write_bytes(dir / "label.bin", bytes);
  try {
    load_cifar_batch(dir / "label.bin", Split::train);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.offset(), kCifarRecordBytes);
  }
  EXPECT_THROW(load_cifar_batch(dir / "absent.bin", Split::train), IoError);
  EXPECT_THROW(load_cifar10(dir), IoError);
}

TEST(CifarLoader, RecordRoundTrip) {
  std::vector<std::uint8_t> rec(kCifarRecordBytes);
  Rng rng(1);
  for (auto& b : rec) b = static_cast<std::uint8_t>(rng.below(256));
  rec[0] = 3;
  const auto again = encode_cifar_record(decode_cifar_pixels(rec.data() + 1), rec[0]);
  EXPECT_TRUE(std::equal(rec.begin(), rec.end(), again.begin()));
}

TEST(CifarLoader, LoadsAWholeDirectory) {
  const auto dir = scratch_dir("dir");
  testing::write_synthetic_cifar_dir(dir, 6, 4, 2);
  const CifarSplits s = load_cifar10(dir);
  EXPECT_EQ(s.train.size(), 30u);
  EXPECT_EQ(s.test.size(), 4u);
  const Dataset expected = testing::synthetic_cifar(6, 2 * 31 + 0);
  EXPECT_EQ(s.train.images[5], expected.images[5]);
  EXPECT_EQ(s.train.labels[5], expected.labels[5]);
}

TEST(Transforms, Examples) {
  EXPECT_EQ(hflip(from_values({1, 1, 3}, {1, 2, 3})).values(), (std::vector<double>{3, 2, 1}));
  EXPECT_EQ(vflip(from_values({1, 2, 1}, {1, 2})).values(), (std::vector<double>{2, 1}));
  EXPECT_EQ(rot90(from_values({1, 2, 2}, {1, 2, 3, 4})).values(), (std::vector<double>{2, 4, 1, 3}));
  EXPECT_THROW(rot90(zeros({1, 2, 3})), ShapeError);
}

TEST(TransformsProperty, GroupRelations) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = verify::random_tensor({2, 5, 5}, rng);
    EXPECT_EQ(hflip(hflip(x)), x);
    EXPECT_EQ(vflip(vflip(x)), x);
    EXPECT_EQ(rot90(rot90(rot90(rot90(x)))), x);
    EXPECT_EQ(hflip(vflip(x)), vflip(hflip(x)));
    EXPECT_EQ(rot90(rot90(x)), apply_transform(x, GridTransform::rot180));
    EXPECT_EQ(hflip(vflip(x)), apply_transform(x, GridTransform::rot180));
  }
}

TEST(Minibatches, FullEpochSplit) {
  Dataset ds;
  ds.images.resize(50000);
  ds.labels.resize(50000);
  const auto batches = minibatches(ds, {0, 1280}, 0);
  ASSERT_EQ(batches.size(), 40u);
  for (std::size_t b = 0; b < 39; ++b) EXPECT_EQ(batches[b].size(), 1280u);
  EXPECT_EQ(batches[39].size(), 80u);
}

TEST(MinibatchesProperty, BijectiveSeededAndEpochDependent) {
  Dataset ds;
  ds.images.resize(1000);
  ds.labels.resize(1000);
  const auto a = minibatches(ds, {5, 64}, 2);
  std::set<std::size_t> seen;
  for (const auto& b : a) seen.insert(b.begin(), b.end());
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(*seen.rbegin(), 999u);
  EXPECT_EQ(a, minibatches(ds, {5, 64}, 2));
  EXPECT_NE(a, minibatches(ds, {5, 64}, 3));
  EXPECT_NE(a, minibatches(ds, {6, 64}, 2));
  EXPECT_THROW(minibatches(Dataset{}, {5, 64}, 0), std::invalid_argument);
}

TEST(SeededSubset, DeterministicAndDistinct) {
  const Dataset ds = testing::synthetic_cifar(50, 4);
  const Dataset a = seeded_subset(ds, 10, 1), b = seeded_subset(ds, 10, 1);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(seeded_subset(ds, 80, 1).size(), 50u);
}

}  // namespace
}  // namespace symk
