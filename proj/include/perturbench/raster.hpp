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
#include <span>
#include <string>
#include <vector>

namespace perturbench {

/// Fixed-size 8-bit raster with 1 (gray) or 3 (RGB) channels.
///
/// Pixels are stored row-major and channel-interleaved: the value of channel
/// `c` at column `x`, row `y` lives at `(y * width + x) * channels + c`.
class RasterImage {
 public:
  RasterImage() = default;

  /// Zero-filled (black) image. Throws DomainError on a zero dimension or a
  /// channel count other than 1 or 3.
  RasterImage(int width, int height, int channels);

  /// Takes ownership of `data`; throws DomainError unless
  /// `data.size() == width * height * channels`.
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }

  std::span<const std::uint8_t> pixel(int x, int y) const {
    return {data_.data() + index(x, y, 0), static_cast<std::size_t>(channels_)};
  }
  std::span<std::uint8_t> pixel(int x, int y) {
    return {data_.data() + index(x, y, 0), static_cast<std::size_t>(channels_)};
  }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  bool same_shape(const RasterImage& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Images with one class label each. All images share one shape and every
/// label indexes `class_names`; the constructor enforces both.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::vector<RasterImage> images, std::vector<int> labels,
                 std::vector<std::string> class_names);

  std::size_t size() const { return images_.size(); }
  bool empty() const { return images_.empty(); }
  std::size_t class_count() const { return class_names_.size(); }

  const std::vector<RasterImage>& images() const { return images_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  const RasterImage& image(std::size_t i) const { return images_.at(i); }
  int label(std::size_t i) const { return labels_.at(i); }

  /// Shape of the first image; all images share it.
  int width() const { return images_.empty() ? 0 : images_.front().width(); }
  int height() const { return images_.empty() ? 0 : images_.front().height(); }
  int channels() const { return images_.empty() ? 0 : images_.front().channels(); }

  /// Dataset made of the listed indices, in listed order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::vector<RasterImage> images_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
};

}  // namespace perturbench
