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

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace perturbench {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Derives the stream seed for one (master, group, image, step) tuple.
///
/// The rule is part of the on-disk reproducibility contract; changing any
/// constant here changes every generated suite.
///
///   h0 = mix64(master + G)
///   h1 = mix64(h0 ^ mix64(group + 2*G))
///   h2 = mix64(h1 ^ mix64(image + 3*G))
///   h3 = mix64(h2 ^ mix64(step  + 4*G))      G = 0x9e3779b97f4a7c15
///
/// Each stage is a bijection of the previous hash for a fixed component, so
/// tuples that differ anywhere yield unrelated seeds.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t group,
                                           std::uint64_t image, std::uint64_t step) {
  constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t h = mix64(master + kGolden);
  h = mix64(h ^ mix64(group + 2 * kGolden));
  h = mix64(h ^ mix64(image + 3 * kGolden));
  h = mix64(h ^ mix64(step + 4 * kGolden));
  return h;
}

/// Master seed of a suite or training run. Every random draw in the library
/// comes from a stream derived from one of these.
struct SeedSpec {
  std::uint64_t master_seed = 0;

  std::uint64_t derive(std::uint64_t group, std::uint64_t image, std::uint64_t step) const {
    return derive_stream_seed(master_seed, group, image, step);
  }
};

/// Portable random stream.
///
/// Backed by std::mt19937_64, whose output sequence the standard fixes. The
/// distribution code lives here rather than in <random> because the standard
/// distributions are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal via the Marsaglia polar method. Pairs are cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// In-place Fisher-Yates shuffle driven by `stream`.
template <typename T>
void shuffle(std::vector<T>& items, RandomStream& stream) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(stream.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace perturbench
