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
#include <filesystem>
#include <span>
#include <vector>

#include "perturbench/raster.hpp"

namespace perturbench {

/// CIFAR-10 binary batch layout: 1 label byte followed by 1024 R, 1024 G and
/// 1024 B bytes, each plane row-major over 32x32.
inline constexpr int kCifarSide = 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * kCifarSide * kCifarSide;

/// The ten CIFAR-10 class names in label order.
const std::vector<std::string>& cifar10_class_names();

/// Parses a whole batch held in memory. Throws FormatError when the length is
/// not a positive multiple of 3073 or a label byte exceeds 9.
LabeledDataset parse_cifar10_batch(std::span<const std::uint8_t> bytes);

/// Reads and parses one batch file (e.g. `data_batch_1.bin`).
LabeledDataset load_cifar10_batch(const std::filesystem::path& path);

/// Lossless 8-bit PNG codec; gray for 1 channel, RGB for 3. Output bytes are
/// stable for a given libpng/zlib build.
std::vector<std::uint8_t> encode_png(const RasterImage& image);

/// Accepts 8-bit gray and 8-bit RGB only; anything else is a FormatError.
RasterImage decode_png(std::span<const std::uint8_t> bytes);

void save_png(const RasterImage& image, const std::filesystem::path& path);
RasterImage load_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace perturbench
