// Copyright 2026 The Perturbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <array>

#include "perturbench/baseline.hpp"
#include "perturbench/error.hpp"
#include "perturbench/synth.hpp"

namespace perturbench {
namespace {

TEST(Synth, DeterministicForASeed) {
  const SynthSpec spec;
  const auto a = synth_dataset(spec, 300, SeedSpec{7});
  const auto b = synth_dataset(spec, 300, SeedSpec{7});
  const auto c = synth_dataset(spec, 300, SeedSpec{8});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Synth, RoundRobinLabels) {
  const auto ds = synth_dataset(SynthSpec{}, 300, SeedSpec{7});
  std::array<int, 3> counts{};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(ds.label(i), static_cast<int>(i % 3));
    ++counts[static_cast<std::size_t>(ds.label(i))];
  }
  EXPECT_EQ(counts, (std::array<int, 3>{100, 100, 100}));
  EXPECT_EQ(ds.class_names(), (std::vector<std::string>{"disc", "ring", "dot"}));
}

TEST(Synth, PrefixIsStableAcrossSizes) {
  const auto small = synth_dataset(SynthSpec{}, 10, SeedSpec{3});
  const auto large = synth_dataset(SynthSpec{}, 50, SeedSpec{3});
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small.image(i), large.image(i));
}

TEST(Synth, ShapeOptions) {
  SynthSpec spec;
  spec.classes = 5;
  spec.channels = 1;
  spec.width = 24;
  spec.height = 40;
  const auto ds = synth_dataset(spec, 10, SeedSpec{1});
  EXPECT_EQ(ds.class_count(), 5u);
  EXPECT_EQ(ds.channels(), 1);
  EXPECT_EQ(ds.width(), 24);
  EXPECT_EQ(ds.height(), 40);
}

TEST(Synth, ForegroundIsBrighterAtTheCenter) {
  const auto ds = synth_dataset(SynthSpec{}, 3, SeedSpec{5});
  // Discs and dots cover the center; the ring leaves it dark.
  const auto center = [&](std::size_t i) { return ds.image(i).at(16, 16, 0); };
  const auto corner = [&](std::size_t i) { return ds.image(i).at(0, 0, 0); };
  EXPECT_GT(center(0), corner(0) + 60);
  EXPECT_LT(center(1), 90);
  EXPECT_GT(center(2), corner(2) + 60);
}

TEST(Synth, InvalidParameters) {
  SynthSpec spec;
  spec.classes = 1;
  EXPECT_THROW(synth_dataset(spec, 10, SeedSpec{}), DomainError);
  spec.classes = 6;
  EXPECT_THROW(synth_dataset(spec, 10, SeedSpec{}), DomainError);
  EXPECT_THROW(synth_dataset(SynthSpec{}, 0, SeedSpec{}), DomainError);
  spec = SynthSpec{};
  spec.channels = 2;
  EXPECT_THROW(synth_dataset(spec, 10, SeedSpec{}), DomainError);
}

TEST(Synth, BaselineLearnsTheCleanTask) {
  const auto train_set = synth_dataset(SynthSpec{}, 300, SeedSpec{7});
  const auto test_set = synth_dataset(SynthSpec{}, 300, SeedSpec{8});
  const auto model = train(train_set, TrainConfig{});
  const double accuracy = evaluate(model, test_set, kCleanGroupId).accuracy;
  // Pinned from a single run of this configuration.
  EXPECT_DOUBLE_EQ(accuracy, 100.0 * 299 / 300);
  EXPECT_GE(accuracy, 90.0);
}

}  // namespace
}  // namespace perturbench
