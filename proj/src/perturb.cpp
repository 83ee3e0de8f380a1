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

#include "perturbench/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "perturbench/error.hpp"

namespace perturbench {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_density(double density) {
  if (!(density >= 0.0 && density <= 1.0)) {
    throw DomainError("salt & pepper density must lie in [0, 1], got " + std::to_string(density));
  }
}

void check_variance(double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw DomainError("Gaussian variance must be finite and non-negative, got " +
                      std::to_string(variance));
  }
}

void check_degrees(double degrees) {
  if (!std::isfinite(degrees)) throw DomainError("rotation angle must be finite");
}

}  // namespace

void validate(const PerturbationStep& step) {
  std::visit(Overloaded{[](const SaltPepper& s) { check_density(s.density); },
                        [](const Gaussian& g) { check_variance(g.variance); },
                        [](const Rotation& r) { check_degrees(r.degrees); }},
             step);
}

bool is_identity(const PerturbationStep& step) {
  return std::visit(Overloaded{[](const SaltPepper& s) { return s.density == 0.0; },
                               [](const Gaussian& g) { return g.variance == 0.0; },
                               [](const Rotation& r) { return r.degrees == 0.0; }},
                    step);
}

std::uint8_t quantize_unit(double value) {
  const double scaled = std::clamp(value, 0.0, 1.0) * 255.0;
  return static_cast<std::uint8_t>(std::round(scaled));
}

RasterImage apply_salt_pepper(const RasterImage& image, double density, RandomStream& stream) {
  check_density(density);
  RasterImage out = image;
  if (density == 0.0) return out;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (stream.uniform() >= density) continue;
      const std::uint8_t value = stream.uniform() < 0.5 ? 255 : 0;
      for (auto& v : out.pixel(x, y)) v = value;
    }
  }
  return out;
}

double gaussian_noise_sample(RandomStream& stream, double variance) {
  return std::sqrt(variance) * stream.normal();
}

RasterImage apply_gaussian(const RasterImage& image, double variance, RandomStream& stream) {
  check_variance(variance);
  RasterImage out = image;
  if (variance == 0.0) return out;
  for (auto& v : out.bytes()) {
    const double noise = gaussian_noise_sample(stream, variance);
    v = quantize_unit(v / 255.0 + noise);
  }
  return out;
}

RasterImage rotate(const RasterImage& image, double degrees) {
  check_degrees(degrees);
  if (degrees == 0.0 || image.empty()) return image;

  const int w = image.width();
  const int h = image.height();
  const int channels = image.channels();
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;

  auto sample = [&](int x, int y, int c) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return image.at(x, y, c);
  };

  RasterImage out(w, h, channels);
  for (int oy = 0; oy < h; ++oy) {
    for (int ox = 0; ox < w; ++ox) {
      // Screen y points down, so the standard rotation matrix turns content
      // clockwise; sample the source through its inverse.
      const double dx = ox - cx;
      const double dy = oy - cy;
      const double sx = cx + cos_t * dx + sin_t * dy;
      const double sy = cy - sin_t * dx + cos_t * dy;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const double fx = sx - fx0;
      const double fy = sy - fy0;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      for (int c = 0; c < channels; ++c) {
        const double value = (1.0 - fx) * (1.0 - fy) * sample(x0, y0, c) +
                             fx * (1.0 - fy) * sample(x0 + 1, y0, c) +
                             (1.0 - fx) * fy * sample(x0, y0 + 1, c) +
                             fx * fy * sample(x0 + 1, y0 + 1, c);
        out.at(ox, oy, c) = static_cast<std::uint8_t>(std::clamp(std::round(value), 0.0, 255.0));
      }
    }
  }
  return out;
}

RasterImage apply_step(const RasterImage& image, const PerturbationStep& step, RandomStream& stream) {
  return std::visit(
      Overloaded{[&](const SaltPepper& s) { return apply_salt_pepper(image, s.density, stream); },
                 [&](const Gaussian& g) { return apply_gaussian(image, g.variance, stream); },
                 [&](const Rotation& r) { return rotate(image, r.degrees); }},
      step);
}

RasterImage apply_chain(const RasterImage& image, const PerturbationChain& chain,
                        const StreamKey& key) {
  for (const auto& step : chain.steps) validate(step);
  RasterImage current = image;
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    RandomStream stream = key.stream_for_step(i);
    current = apply_step(current, chain.steps[i], stream);
  }
  return current;
}

}  // namespace perturbench
