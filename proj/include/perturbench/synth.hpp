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

#include "perturbench/random.hpp"
#include "perturbench/raster.hpp"

namespace perturbench {

/// Parameters of the synthetic shape dataset. Classes, in order:
/// disc, ring, dot, square, cross (at most 5). The first three are rotation
/// invariant.
struct SynthSpec {
  int classes = 3;
  int width = 32;
  int height = 32;
  int channels = 3;
  /// Maximum shape-center displacement from the image center, in pixels.
  int position_jitter = 3;
};

/// Deterministic shape dataset; image i has label i % classes. Shapes are
/// drawn in a random bright color over a random dark background with mild
/// texture noise.
LabeledDataset synth_dataset(const SynthSpec& spec, std::size_t n, SeedSpec seed);

}  // namespace perturbench
