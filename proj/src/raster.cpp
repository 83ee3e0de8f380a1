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

#include "perturbench/raster.hpp"

#include <string>
#include <utility>

#include "perturbench/error.hpp"

namespace perturbench {
namespace {

void check_shape(int width, int height, int channels) {
  if (width <= 0 || height <= 0) {
    throw DomainError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw DomainError("images have 1 or 3 channels, got " + std::to_string(channels));
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels);
  const auto expected = static_cast<std::size_t>(width) * height * channels;
  if (data_.size() != expected) {
    throw DomainError("pixel buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                      std::to_string(expected));
  }
}

LabeledDataset::LabeledDataset(std::vector<RasterImage> images, std::vector<int> labels,
                               std::vector<std::string> class_names)
    : images_(std::move(images)), labels_(std::move(labels)), class_names_(std::move(class_names)) {
  if (images_.size() != labels_.size()) {
    throw DomainError("dataset has " + std::to_string(images_.size()) + " images but " +
                      std::to_string(labels_.size()) + " labels");
  }
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i].empty() || !images_[i].same_shape(images_.front())) {
      throw DomainError("image " + std::to_string(i) + " does not match the dataset shape");
    }
    if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= class_names_.size()) {
      throw DomainError("label " + std::to_string(labels_[i]) + " of image " + std::to_string(i) +
                        " is outside the " + std::to_string(class_names_.size()) + " classes");
    }
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<RasterImage> images;
  std::vector<int> labels;
  images.reserve(indices.size());
  labels.reserve(indices.size());
  for (const auto i : indices) {
    images.push_back(images_.at(i));
    labels.push_back(labels_.at(i));
  }
  return LabeledDataset(std::move(images), std::move(labels), class_names_);
}

}  // namespace perturbench
