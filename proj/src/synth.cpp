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

#include "perturbench/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "perturbench/error.hpp"

namespace perturbench {
namespace {

constexpr std::uint64_t kSynthStreamTag = 0x53594e54;  // "SYNT"

const std::array<const char*, 5> kShapeNames = {"disc", "ring", "dot", "square", "cross"};

bool inside_box(double dx, double dy, double half_w, double half_h) {
  return std::abs(dx) <= half_w && std::abs(dy) <= half_h;
}

bool covers(int shape, double dx, double dy, double scale) {
  const double r2 = dx * dx + dy * dy;
  switch (shape) {
    case 0:
      return r2 <= (8.0 * scale) * (8.0 * scale);
    case 1:
      return r2 <= (10.0 * scale) * (10.0 * scale) && r2 >= (6.0 * scale) * (6.0 * scale);
    case 2:
      return r2 <= (4.0 * scale) * (4.0 * scale);
    case 3:
      return inside_box(dx, dy, 7.0 * scale, 7.0 * scale);
    default:
      return inside_box(dx, dy, 10.0 * scale, 2.5 * scale) ||
             inside_box(dx, dy, 2.5 * scale, 10.0 * scale);
  }
}

}  // namespace

LabeledDataset synth_dataset(const SynthSpec& spec, std::size_t n, SeedSpec seed) {
  if (n == 0) throw DomainError("synthetic dataset needs at least one image");
  if (spec.classes < 2 || spec.classes > static_cast<int>(kShapeNames.size())) {
    throw DomainError("synthetic dataset supports 2 to 5 classes, got " +
                      std::to_string(spec.classes));
  }
  if (spec.position_jitter < 0) throw DomainError("position jitter must be non-negative");

  std::vector<std::string> names(kShapeNames.begin(), kShapeNames.begin() + spec.classes);
  std::vector<RasterImage> images;
  std::vector<int> labels;
  images.reserve(n);
  labels.reserve(n);

  // Shapes are sized for a 32-pixel canvas and scaled to the actual one.
  const double scale = std::min(spec.width, spec.height) / 32.0;
  const double cx0 = (spec.width - 1) / 2.0;
  const double cy0 = (spec.height - 1) / 2.0;

  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(spec.classes));
    RandomStream stream(seed.derive(kSynthStreamTag, i, 0));
    RasterImage image(spec.width, spec.height, spec.channels);

    const auto jitter_span = static_cast<std::uint64_t>(2 * spec.position_jitter + 1);
    const double cx = cx0 + static_cast<double>(stream.uniform_index(jitter_span)) - spec.position_jitter;
    const double cy = cy0 + static_cast<double>(stream.uniform_index(jitter_span)) - spec.position_jitter;

    std::array<double, 3> background{};
    std::array<double, 3> foreground{};
    for (int c = 0; c < 3; ++c) {
      background[c] = 10.0 + 50.0 * stream.uniform();
      foreground[c] = 160.0 + 95.0 * stream.uniform();
    }

    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const bool on = covers(label, x - cx, y - cy, scale);
        const double texture = 16.0 * (stream.uniform() - 0.5);
        for (int c = 0; c < spec.channels; ++c) {
          const double base = on ? foreground[c] : background[c];
          image.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::round(base + texture), 0.0, 255.0));
        }
      }
    }
    images.push_back(std::move(image));
    labels.push_back(label);
  }
  return LabeledDataset(std::move(images), std::move(labels), std::move(names));
}

}  // namespace perturbench
