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

#include "perturbench/image_io.hpp"

#include <png.h>

#include <fstream>
#include <iterator>
#include <string>

#include "perturbench/error.hpp"

namespace perturbench {

const std::vector<std::string>& cifar10_class_names() {
  static const std::vector<std::string> names = {"airplane", "automobile", "bird",  "cat",  "deer",
                                                 "dog",      "frog",       "horse", "ship", "truck"};
  return names;
}

LabeledDataset parse_cifar10_batch(std::span<const std::uint8_t> bytes) {
  if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
    throw FormatError("CIFAR-10 batch length " + std::to_string(bytes.size()) +
                      " is not a positive multiple of " + std::to_string(kCifarRecordBytes));
  }
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  const std::size_t records = bytes.size() / kCifarRecordBytes;

  std::vector<RasterImage> images;
  std::vector<int> labels;
  images.reserve(records);
  labels.reserve(records);
  for (std::size_t r = 0; r < records; ++r) {
    const auto record = bytes.subspan(r * kCifarRecordBytes, kCifarRecordBytes);
    if (record[0] > 9) {
      throw FormatError("record " + std::to_string(r) + " has label byte " +
                        std::to_string(record[0]));
    }
    // Planar R, G, B on disk; interleaved in memory.
    std::vector<std::uint8_t> pixels(3 * plane);
    for (std::size_t p = 0; p < plane; ++p) {
      for (std::size_t c = 0; c < 3; ++c) pixels[p * 3 + c] = record[1 + c * plane + p];
    }
    images.emplace_back(kCifarSide, kCifarSide, 3, std::move(pixels));
    labels.push_back(record[0]);
  }
  return LabeledDataset(std::move(images), std::move(labels), cifar10_class_names());
}

LabeledDataset load_cifar10_batch(const std::filesystem::path& path) {
  return parse_cifar10_batch(read_file(path));
}

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  if (image.empty()) throw DomainError("cannot encode an empty image");
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width());
  desc.height = static_cast<png_uint_32>(image.height());
  desc.format = image.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

  const auto stride = static_cast<png_int_32>(image.width() * image.channels());
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, image.bytes().data(), stride, nullptr)) {
    const std::string message = desc.message;
    png_image_free(&desc);
    throw FormatError("PNG encode failed: " + message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.bytes().data(), stride,
                                 nullptr)) {
    const std::string message = desc.message;
    png_image_free(&desc);
    throw FormatError("PNG encode failed: " + message);
  }
  out.resize(size);
  return out;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size())) {
    const std::string message = desc.message;
    png_image_free(&desc);
    throw FormatError("PNG decode failed: " + message);
  }
  int channels = 0;
  if (desc.format == PNG_FORMAT_GRAY) {
    channels = 1;
  } else if (desc.format == PNG_FORMAT_RGB) {
    channels = 3;
  } else {
    png_image_free(&desc);
    throw FormatError("unsupported PNG color type (only 8-bit gray and RGB are accepted)");
  }
  const int width = static_cast<int>(desc.width);
  const int height = static_cast<int>(desc.height);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * channels);
  if (!png_image_finish_read(&desc, nullptr, pixels.data(), width * channels, nullptr)) {
    const std::string message = desc.message;
    png_image_free(&desc);
    throw FormatError("PNG decode failed: " + message);
  }
  return RasterImage(width, height, channels, std::move(pixels));
}

void save_png(const RasterImage& image, const std::filesystem::path& path) {
  write_file(path, encode_png(image));
}

RasterImage load_png(const std::filesystem::path& path) {
  try {
    return decode_png(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace perturbench
