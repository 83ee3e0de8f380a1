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

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "perturbench/random.hpp"
#include "perturbench/raster.hpp"

namespace perturbench {

/// Impulse noise. `density` is the per-pixel selection probability.
struct SaltPepper {
  double density = 0.0;
  friend bool operator==(const SaltPepper&, const SaltPepper&) = default;
};

/// Additive zero-mean noise on [0,1]-normalized intensities.
struct Gaussian {
  double variance = 0.0;
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Rotation about the image center; positive is clockwise on screen.
struct Rotation {
  double degrees = 0.0;
  friend bool operator==(const Rotation&, const Rotation&) = default;
};

using PerturbationStep = std::variant<SaltPepper, Gaussian, Rotation>;

/// Throws DomainError if the step's severity is out of range.
void validate(const PerturbationStep& step);

/// True for severities that leave every image unchanged.
bool is_identity(const PerturbationStep& step);

/// Steps applied in order. Empty means clean.
struct PerturbationChain {
  std::vector<PerturbationStep> steps;

  bool empty() const { return steps.empty(); }
  std::size_t size() const { return steps.size(); }
  friend bool operator==(const PerturbationChain&, const PerturbationChain&) = default;
};

/// Identifies whose noise a stream feeds: step `s` of a chain applied to
/// image `image_index` of group `group_id` draws from
/// `RandomStream(seed.derive(group_id, image_index, s))`.
struct StreamKey {
  SeedSpec seed;
  std::uint64_t group_id = 0;
  std::uint64_t image_index = 0;

  RandomStream stream_for_step(std::uint64_t step) const {
    return RandomStream(seed.derive(group_id, image_index, step));
  }
};

/// Maps a [0,1]-scale intensity back to 8 bits: clamp, scale by 255, round
/// half away from zero.
std::uint8_t quantize_unit(double value);

/// Each pixel is selected with probability `density`; a selected pixel gets
/// all channels set to 0 or 255 with equal odds.
///
/// Per pixel, in row-major order, one uniform is drawn for selection and, for
/// selected pixels only, a second for salt versus pepper.
RasterImage apply_salt_pepper(const RasterImage& image, double density, RandomStream& stream);

/// One pre-clamp noise draw with the given variance, as used by apply_gaussian.
double gaussian_noise_sample(RandomStream& stream, double variance);

/// x -> quantize_unit(x / 255 + n) per channel value, n ~ N(0, variance),
/// one draw per value in storage order.
RasterImage apply_gaussian(const RasterImage& image, double variance, RandomStream& stream);

/// Same-size rotation with bilinear sampling and black fill outside the source.
/// A zero angle returns the input unchanged.
RasterImage rotate(const RasterImage& image, double degrees);

RasterImage apply_step(const RasterImage& image, const PerturbationStep& step, RandomStream& stream);

/// Applies `chain.steps` in order; step i uses `key.stream_for_step(i)`.
RasterImage apply_chain(const RasterImage& image, const PerturbationChain& chain,
                        const StreamKey& key);

}  // namespace perturbench
