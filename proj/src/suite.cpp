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

#include "perturbench/suite.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "perturbench/error.hpp"
#include "perturbench/image_io.hpp"

namespace perturbench {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSamplingStreamTag = 0x53414d50;  // "SAMP"

constexpr std::array<double, 4> kNoiseLevels = {0.0, 0.1, 0.15, 0.2};
constexpr std::array<double, 5> kRotationLevels = {-60.0, -30.0, 0.0, 30.0, 60.0};

PerturbationChain two_step(const PerturbationStep& first, const PerturbationStep& second) {
  PerturbationChain chain;
  if (!is_identity(first)) chain.steps.push_back(first);
  if (!is_identity(second)) chain.steps.push_back(second);
  return chain;
}

std::vector<GroupSpec> build_groups() {
  std::vector<GroupSpec> groups;
  auto add = [&groups](PerturbationChain chain, Family family) {
    GroupSpec spec;
    spec.group_id = static_cast<int>(groups.size()) + 1;
    spec.name = chain_name(chain);
    spec.chain = std::move(chain);
    spec.family = family;
    groups.push_back(std::move(spec));
  };

  add(PerturbationChain{}, Family::kClean);
  for (double sp : kNoiseLevels) {
    for (double ga : kNoiseLevels) {
      if (sp == 0.0 && ga == 0.0) continue;
      add(two_step(SaltPepper{sp}, Gaussian{ga}), Family::kSpGa);
    }
  }
  for (double ga : kNoiseLevels) {
    for (double sp : kNoiseLevels) {
      if (sp == 0.0 && ga == 0.0) continue;
      add(two_step(Gaussian{ga}, SaltPepper{sp}), Family::kGaSp);
    }
  }
  for (double sp : kNoiseLevels) {
    for (double ro : kRotationLevels) {
      if (sp == 0.0 && ro == 0.0) continue;
      add(two_step(SaltPepper{sp}, Rotation{ro}), Family::kSpRo);
    }
  }
  for (double ro : kRotationLevels) {
    for (double sp : kNoiseLevels) {
      if (sp == 0.0 && ro == 0.0) continue;
      add(two_step(Rotation{ro}, SaltPepper{sp}), Family::kRoSp);
    }
  }
  return groups;
}

std::string hex(std::span<const unsigned char> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

void append_u32le(std::vector<std::uint8_t>& buffer, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buffer.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

json step_to_json(const PerturbationStep& step) {
  if (const auto* s = std::get_if<SaltPepper>(&step)) return {{"op", "salt_pepper"}, {"density", s->density}};
  if (const auto* g = std::get_if<Gaussian>(&step)) return {{"op", "gaussian"}, {"variance", g->variance}};
  return {{"op", "rotation"}, {"degrees", std::get<Rotation>(step).degrees}};
}

PerturbationStep step_from_json(const json& doc) {
  const auto op = doc.at("op").get<std::string>();
  if (op == "salt_pepper") return SaltPepper{doc.at("density").get<double>()};
  if (op == "gaussian") return Gaussian{doc.at("variance").get<double>()};
  if (op == "rotation") return Rotation{doc.at("degrees").get<double>()};
  throw FormatError("unknown perturbation op '" + op + "'");
}

void write_labels(const std::filesystem::path& path, std::span<const int> labels) {
  std::string text;
  for (const int label : labels) {
    text += std::to_string(label);
    text += '\n';
  }
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  std::vector<int> labels;
  std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const auto line = text.substr(0, eol);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw FormatError(path.string() + ": bad label line '" + std::string(line) + "'");
    }
    labels.push_back(value);
    if (eol == std::string_view::npos) break;
    text.remove_prefix(eol + 1);
  }
  return labels;
}

void write_group(const std::filesystem::path& dir, const LabeledDataset& images) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < images.size(); ++i) {
    save_png(images.image(i), dir / (std::to_string(i) + ".png"));
  }
  write_labels(dir / "labels.txt", images.labels());
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kClean: return "CLEAN";
    case Family::kSpGa: return "SP_GA";
    case Family::kGaSp: return "GA_SP";
    case Family::kSpRo: return "SP_RO";
    case Family::kRoSp: return "RO_SP";
  }
  return "CLEAN";
}

Family family_from_string(std::string_view text) {
  for (auto f : {Family::kClean, Family::kSpGa, Family::kGaSp, Family::kSpRo, Family::kRoSp}) {
    if (to_string(f) == text) return f;
  }
  throw FormatError("unknown group family '" + std::string(text) + "'");
}

std::string format_severity(double value) {
  std::array<char, 32> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) throw DomainError("cannot format severity");
  return std::string(buffer.data(), ptr);
}

std::string chain_name(const PerturbationChain& chain) {
  if (chain.empty()) return "clean";
  std::string name;
  for (const auto& step : chain.steps) {
    if (const auto* s = std::get_if<SaltPepper>(&step)) {
      name += "SP" + format_severity(s->density);
    } else if (const auto* g = std::get_if<Gaussian>(&step)) {
      name += "GA" + format_severity(g->variance);
    } else {
      const double degrees = std::get<Rotation>(step).degrees;
      if (degrees < 0) {
        name += "RL" + format_severity(-degrees);
      } else if (degrees > 0) {
        name += "RR" + format_severity(degrees);
      } else {
        name += "RO0";
      }
    }
  }
  return name;
}

PerturbationChain parse_chain_name(std::string_view name) {
  PerturbationChain chain;
  if (name == "clean") return chain;
  const std::string original(name);
  if (name.empty()) throw FormatError("empty group name");
  while (!name.empty()) {
    if (name.size() < 3) throw FormatError("cannot parse group name '" + original + "'");
    const auto tag = name.substr(0, 2);
    name.remove_prefix(2);
    const auto end = name.find_first_not_of("0123456789.");
    const auto number = name.substr(0, end);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (number.empty() || ec != std::errc{} || ptr != number.data() + number.size()) {
      throw FormatError("cannot parse group name '" + original + "'");
    }
    name.remove_prefix(number.size());
    if (tag == "SP") {
      chain.steps.emplace_back(SaltPepper{value});
    } else if (tag == "GA") {
      chain.steps.emplace_back(Gaussian{value});
    } else if (tag == "RL") {
      chain.steps.emplace_back(Rotation{-value});
    } else if (tag == "RR") {
      chain.steps.emplace_back(Rotation{value});
    } else if (tag == "RO" && value == 0.0) {
      chain.steps.emplace_back(Rotation{0.0});
    } else {
      throw FormatError("unknown perturbation tag '" + std::string(tag) + "' in '" + original + "'");
    }
  }
  return chain;
}

const std::vector<GroupSpec>& enumerate_groups() {
  static const std::vector<GroupSpec> groups = build_groups();
  return groups;
}

const GroupSpec& find_group(std::string_view name) {
  for (const auto& group : enumerate_groups()) {
    if (group.name == name) return group;
  }
  throw ValidationError("no benchmark group named '" + std::string(name) + "'");
}

std::string group_directory_name(const GroupSpec& group) {
  return std::to_string(group.group_id) + "_" + group.name;
}

std::vector<std::size_t> sample_indices(std::size_t dataset_size, const SuiteParams& params) {
  if (params.images_per_group == 0) throw DomainError("images per group must be positive");
  if (params.sample_offset + params.images_per_group > dataset_size) {
    throw DomainError("dataset has " + std::to_string(dataset_size) + " images; need " +
                      std::to_string(params.sample_offset + params.images_per_group));
  }
  std::vector<std::size_t> order(dataset_size);
  for (std::size_t i = 0; i < dataset_size; ++i) order[i] = i;
  RandomStream stream(derive_stream_seed(params.sampling_seed, kSamplingStreamTag, 0, 0));
  shuffle(order, stream);
  const auto first = order.begin() + static_cast<std::ptrdiff_t>(params.sample_offset);
  return {first, first + static_cast<std::ptrdiff_t>(params.images_per_group)};
}

LabeledDataset corrupt_dataset(const LabeledDataset& source, const GroupSpec& group, SeedSpec seed) {
  std::vector<RasterImage> images;
  images.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const StreamKey key{seed, static_cast<std::uint64_t>(group.group_id), i};
    images.push_back(apply_chain(source.image(i), group.chain, key));
  }
  return LabeledDataset(std::move(images), source.labels(), source.class_names());
}

std::string group_digest(const LabeledDataset& group_images) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialization failed");
  }
  std::vector<std::uint8_t> header;
  for (std::size_t i = 0; i < group_images.size(); ++i) {
    const auto& image = group_images.image(i);
    header.clear();
    append_u32le(header, static_cast<std::uint32_t>(image.width()));
    append_u32le(header, static_cast<std::uint32_t>(image.height()));
    append_u32le(header, static_cast<std::uint32_t>(image.channels()));
    append_u32le(header, static_cast<std::uint32_t>(group_images.label(i)));
    EVP_DigestUpdate(ctx.get(), header.data(), header.size());
    EVP_DigestUpdate(ctx.get(), image.bytes().data(), image.bytes().size());
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw Error("SHA-256 finalization failed");
  }
  return hex({digest.data(), length});
}

SuiteManifest generate_suite(const LabeledDataset& dataset, const SuiteParams& params,
                             const std::filesystem::path& out_dir) {
  const auto indices = sample_indices(dataset.size(), params);
  const LabeledDataset source = dataset.subset(indices);
  const auto& groups = enumerate_groups();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::string> digests(groups.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::string failed_group;

  auto worker = [&] {
    for (auto g = next.fetch_add(1); g < groups.size(); g = next.fetch_add(1)) {
      try {
        const LabeledDataset corrupted = corrupt_dataset(source, groups[g], SeedSpec{params.master_seed});
        write_group(out_dir / group_directory_name(groups[g]), corrupted);
        digests[g] = group_digest(corrupted);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
          failed_group = group_directory_name(groups[g]);
        }
        next = groups.size();
      }
    }
  };

  const unsigned threads = std::max(1u, params.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw IoError("group " + failed_group + ": " + e.what());
    }
  }

  SuiteManifest manifest;
  manifest.master_seed = params.master_seed;
  manifest.dataset_id = params.dataset_id;
  manifest.images_per_group = params.images_per_group;
  manifest.sampling_seed = params.sampling_seed;
  manifest.sample_offset = params.sample_offset;
  manifest.source_indices = indices;
  manifest.class_names = dataset.class_names();
  manifest.width = dataset.width();
  manifest.height = dataset.height();
  manifest.channels = dataset.channels();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ManifestGroup entry{groups[g], digests[g], std::nullopt};
    if (const auto it = params.aliases.find(groups[g].name); it != params.aliases.end()) {
      entry.alias = it->second;
    }
    manifest.groups.push_back(std::move(entry));
  }
  manifest.config = {{"master_seed", params.master_seed},
                     {"images_per_group", params.images_per_group},
                     {"sampling_seed", params.sampling_seed},
                     {"sample_offset", params.sample_offset},
                     {"dataset", params.dataset_id}};
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

nlohmann::json manifest_to_json(const SuiteManifest& manifest) {
  json groups = json::array();
  for (const auto& entry : manifest.groups) {
    json steps = json::array();
    for (const auto& step : entry.spec.chain.steps) steps.push_back(step_to_json(step));
    json g = {{"group_id", entry.spec.group_id},
              {"name", entry.spec.name},
              {"family", to_string(entry.spec.family)},
              {"chain", std::move(steps)},
              {"digest", entry.digest}};
    if (entry.alias) g["alias"] = *entry.alias;
    groups.push_back(std::move(g));
  }
  return {{"spec_version", manifest.spec_version},
          {"master_seed", manifest.master_seed},
          {"source",
           {{"dataset", manifest.dataset_id},
            {"images_per_group", manifest.images_per_group},
            {"sampling_seed", manifest.sampling_seed},
            {"sample_offset", manifest.sample_offset},
            {"indices", manifest.source_indices},
            {"class_names", manifest.class_names},
            {"width", manifest.width},
            {"height", manifest.height},
            {"channels", manifest.channels}}},
          {"groups", std::move(groups)},
          {"config", manifest.config}};
}

SuiteManifest manifest_from_json(const nlohmann::json& doc) {
  SuiteManifest manifest;
  try {
    manifest.spec_version = doc.at("spec_version").get<std::string>();
    manifest.master_seed = doc.at("master_seed").get<std::uint64_t>();
    const auto& source = doc.at("source");
    manifest.dataset_id = source.at("dataset").get<std::string>();
    manifest.images_per_group = source.at("images_per_group").get<std::size_t>();
    manifest.sampling_seed = source.at("sampling_seed").get<std::uint64_t>();
    manifest.sample_offset = source.at("sample_offset").get<std::size_t>();
    manifest.source_indices = source.at("indices").get<std::vector<std::size_t>>();
    manifest.class_names = source.at("class_names").get<std::vector<std::string>>();
    manifest.width = source.at("width").get<int>();
    manifest.height = source.at("height").get<int>();
    manifest.channels = source.at("channels").get<int>();
    for (const auto& g : doc.at("groups")) {
      ManifestGroup entry;
      entry.spec.group_id = g.at("group_id").get<int>();
      entry.spec.name = g.at("name").get<std::string>();
      entry.spec.family = family_from_string(g.at("family").get<std::string>());
      for (const auto& step : g.at("chain")) entry.spec.chain.steps.push_back(step_from_json(step));
      entry.digest = g.at("digest").get<std::string>();
      if (g.contains("alias")) entry.alias = g.at("alias").get<int>();
      manifest.groups.push_back(std::move(entry));
    }
    if (doc.contains("config")) manifest.config = doc.at("config");
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }

  if (manifest.spec_version != kSuiteVersion) {
    throw ValidationError("manifest version '" + manifest.spec_version + "' is not " + kSuiteVersion);
  }
  if (manifest.groups.size() != static_cast<std::size_t>(kGroupCount)) {
    throw ValidationError("manifest lists " + std::to_string(manifest.groups.size()) +
                          " groups; a suite has exactly " + std::to_string(kGroupCount));
  }
  std::array<int, 5> family_sizes{};
  for (const auto& entry : manifest.groups) ++family_sizes[static_cast<int>(entry.spec.family)];
  if (family_sizes != std::array<int, 5>{1, 15, 15, 19, 19}) {
    throw ValidationError("manifest family sizes differ from 1/15/15/19/19");
  }
  const auto& canonical = enumerate_groups();
  for (std::size_t i = 0; i < manifest.groups.size(); ++i) {
    const auto& spec = manifest.groups[i].spec;
    if (spec.name != chain_name(spec.chain)) {
      throw ValidationError("group " + std::to_string(spec.group_id) + " is named '" + spec.name +
                            "' but its chain is '" + chain_name(spec.chain) + "'");
    }
    if (!(spec == canonical[i])) {
      throw ValidationError("group at position " + std::to_string(i + 1) + " ('" + spec.name +
                            "') differs from canonical group '" + canonical[i].name + "'");
    }
  }
  if (manifest.source_indices.size() != manifest.images_per_group) {
    throw ValidationError("manifest source index count differs from images_per_group");
  }
  return manifest;
}

void write_manifest(const SuiteManifest& manifest, const std::filesystem::path& path) {
  const std::string text = manifest_to_json(manifest).dump(2) + "\n";
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

SuiteManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded()) throw FormatError(path.string() + ": not valid JSON");
  return manifest_from_json(doc);
}

LabeledDataset load_group(const std::filesystem::path& suite_dir, const SuiteManifest& manifest,
                          const GroupSpec& group) {
  const auto dir = suite_dir / group_directory_name(group);
  if (!std::filesystem::is_directory(dir)) throw IoError("missing group directory " + dir.string());
  auto labels = read_labels(dir / "labels.txt");
  if (labels.size() != manifest.images_per_group) {
    throw FormatError(dir.string() + ": labels.txt has " + std::to_string(labels.size()) +
                      " entries, expected " + std::to_string(manifest.images_per_group));
  }
  std::vector<RasterImage> images;
  images.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    images.push_back(load_png(dir / (std::to_string(i) + ".png")));
  }
  try {
    return LabeledDataset(std::move(images), std::move(labels), manifest.class_names);
  } catch (const DomainError& e) {
    throw FormatError(dir.string() + ": " + e.what());
  }
}

std::vector<DigestMismatch> verify_suite(const SuiteManifest& manifest,
                                         const std::filesystem::path& suite_dir) {
  std::vector<DigestMismatch> mismatches;
  for (const auto& entry : manifest.groups) {
    const auto dir = suite_dir / group_directory_name(entry.spec);
    if (!std::filesystem::is_directory(dir)) throw IoError("missing group directory " + dir.string());
    try {
      const auto actual = group_digest(load_group(suite_dir, manifest, entry.spec));
      if (actual != entry.digest) {
        mismatches.push_back({entry.spec.group_id, entry.spec.name, entry.digest, actual, "digest differs"});
      }
    } catch (const Error& e) {
      mismatches.push_back({entry.spec.group_id, entry.spec.name, entry.digest, "", e.what()});
    }
  }
  return mismatches;
}

std::vector<std::size_t> shared_source_indices(const SuiteManifest& a, const SuiteManifest& b) {
  if (a.dataset_id != b.dataset_id) return {};
  const std::set<std::size_t> left(a.source_indices.begin(), a.source_indices.end());
  std::vector<std::size_t> shared;
  for (const auto i : std::set<std::size_t>(b.source_indices.begin(), b.source_indices.end())) {
    if (left.contains(i)) shared.push_back(i);
  }
  return shared;
}

std::map<std::string, int> load_group_aliases(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw FormatError(path.string() + ": alias map must be a JSON object");
  }
  std::map<std::string, int> aliases;
  for (const auto& [name, number] : doc.items()) {
    if (!number.is_number_integer()) throw FormatError("alias for '" + name + "' is not an integer");
    find_group(name);
    aliases[name] = number.get<int>();
  }
  return aliases;
}

}  // namespace perturbench
