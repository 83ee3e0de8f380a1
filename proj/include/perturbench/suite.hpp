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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "perturbench/perturb.hpp"
#include "perturbench/raster.hpp"

namespace perturbench {

inline constexpr int kGroupCount = 69;
inline constexpr int kCleanGroupId = 1;
inline constexpr const char* kSuiteVersion = "1.0";

enum class Family { kClean, kSpGa, kGaSp, kSpRo, kRoSp };

/// "CLEAN", "SP_GA", "GA_SP", "SP_RO", "RO_SP".
std::string_view to_string(Family family);
Family family_from_string(std::string_view text);

struct GroupSpec {
  int group_id = 0;
  std::string name;
  PerturbationChain chain;
  Family family = Family::kClean;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// Shortest decimal form of a severity: 0.1 -> "0.1", 30 -> "30".
std::string format_severity(double value);

/// Canonical group name of a chain: "clean", "SP0.1", "GA0.15", "RL30" for
/// -30 degrees, "RR60" for +60 degrees; two-factor names concatenate.
std::string chain_name(const PerturbationChain& chain);

/// Inverse of chain_name. Throws FormatError on anything it cannot parse.
PerturbationChain parse_chain_name(std::string_view name);

/// The 69 benchmark groups in canonical order.
///
///   1       clean
///   2-16    SP then GA, SP in {0,.1,.15,.2} outer, GA in {0,.1,.15,.2} inner
///   17-31   GA then SP, same grid
///   32-50   SP then rotation, SP outer, rotation in {-60,-30,0,30,60} inner
///   51-69   rotation then SP, rotation outer, SP inner
///
/// The all-zero cell of each grid is skipped; zero-severity steps are dropped
/// from the chain, so a cell like (SP 0.1, GA 0) is the single-factor "SP0.1".
const std::vector<GroupSpec>& enumerate_groups();

/// First group in canonical order with this name. Throws ValidationError.
const GroupSpec& find_group(std::string_view name);

/// "<id>_<name>", the group's directory under a suite root.
std::string group_directory_name(const GroupSpec& group);

struct SuiteParams {
  std::uint64_t master_seed = 0;
  std::size_t images_per_group = 500;
  /// Source images are picked as a window of a seeded permutation of the
  /// dataset: positions [sample_offset, sample_offset + images_per_group).
  std::uint64_t sampling_seed = 0;
  std::size_t sample_offset = 0;
  std::string dataset_id = "unnamed";
  /// Worker threads for generation; output does not depend on it.
  unsigned threads = 1;
  /// Optional mapping from canonical group names to external type numbers.
  std::map<std::string, int> aliases;
};

struct ManifestGroup {
  GroupSpec spec;
  std::string digest;  // lowercase hex SHA-256
  std::optional<int> alias;
};

struct SuiteManifest {
  std::string spec_version = kSuiteVersion;
  std::uint64_t master_seed = 0;
  std::string dataset_id;
  std::size_t images_per_group = 0;
  std::uint64_t sampling_seed = 0;
  std::size_t sample_offset = 0;
  std::vector<std::size_t> source_indices;
  std::vector<std::string> class_names;
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<ManifestGroup> groups;
  nlohmann::json config = nlohmann::json::object();
};

/// Indices into a dataset of `dataset_size` images selected by `params`.
/// Throws DomainError when the window runs past the end.
std::vector<std::size_t> sample_indices(std::size_t dataset_size, const SuiteParams& params);

/// Applies `group.chain` to every image; image i uses stream key
/// (seed, group.group_id, i). Labels and class names are kept.
LabeledDataset corrupt_dataset(const LabeledDataset& source, const GroupSpec& group, SeedSpec seed);

/// SHA-256 over, per image in index order: width, height, channels and label
/// as little-endian u32, then the interleaved pixel bytes.
std::string group_digest(const LabeledDataset& group_images);

/// Writes all 69 groups plus `manifest.json` under `out_dir`.
SuiteManifest generate_suite(const LabeledDataset& dataset, const SuiteParams& params,
                             const std::filesystem::path& out_dir);

nlohmann::json manifest_to_json(const SuiteManifest& manifest);
/// Parses and validates structure: 69 groups, family sizes 1/15/15/19/19,
/// ids 1..69 in order, names consistent with chains.
SuiteManifest manifest_from_json(const nlohmann::json& doc);

void write_manifest(const SuiteManifest& manifest, const std::filesystem::path& path);
SuiteManifest load_manifest(const std::filesystem::path& path);

/// Reads `<suite_dir>/<id>_<name>/` back into memory.
LabeledDataset load_group(const std::filesystem::path& suite_dir, const SuiteManifest& manifest,
                          const GroupSpec& group);

struct DigestMismatch {
  int group_id = 0;
  std::string name;
  std::string expected;
  std::string actual;  // empty when the group could not be read
  std::string reason;
};

/// Re-reads every group and compares digests. Throws IoError when a group
/// directory is missing; unreadable images are reported as mismatches.
std::vector<DigestMismatch> verify_suite(const SuiteManifest& manifest,
                                         const std::filesystem::path& suite_dir);

/// Source indices used by both suites when they share a dataset; empty when
/// the datasets differ.
std::vector<std::size_t> shared_source_indices(const SuiteManifest& a, const SuiteManifest& b);

/// Reads `{"<name>": <number>, ...}`.
std::map<std::string, int> load_group_aliases(const std::filesystem::path& path);

}  // namespace perturbench
