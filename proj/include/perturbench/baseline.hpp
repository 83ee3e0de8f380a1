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
#include <span>
#include <string>
#include <vector>

#include "perturbench/raster.hpp"
#include "perturbench/report.hpp"
#include "perturbench/suite.hpp"

namespace perturbench {

/// Multinomial logistic regression over raw intensities scaled to [0, 1].
struct SoftmaxModel {
  int width = 0;
  int height = 0;
  int channels = 0;
  int classes = 0;
  std::vector<double> weights;  // classes x features, row-major
  std::vector<double> bias;     // classes
  std::string training_group = "clean";

  std::size_t features() const { return static_cast<std::size_t>(width) * height * channels; }

  friend bool operator==(const SoftmaxModel&, const SoftmaxModel&) = default;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 20;
  double l2 = 1e-3;
  std::size_t batch_size = 25;
  std::uint64_t seed = 0;
};

/// Row-major feature matrix with one label per row.
struct FeatureBatch {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<int> labels;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
};

std::vector<double> image_features(const RasterImage& image);
FeatureBatch make_batch(const LabeledDataset& dataset);
FeatureBatch make_batch(const LabeledDataset& dataset, std::span<const std::size_t> indices);

/// Weights ~ N(0, 0.01^2) from the seed's init stream, zero bias.
SoftmaxModel initialize_model(int classes, int width, int height, int channels, std::uint64_t seed);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Mean cross-entropy over the batch plus 0.5 * l2 * |W|^2 (bias unpenalized),
/// and its analytic gradient.
LossGradient loss_and_gradient(const SoftmaxModel& model, const FeatureBatch& batch, double l2);

/// Mini-batch gradient descent. Shuffle order and initialization come from
/// `cfg.seed`; single-threaded so results are bit-reproducible.
SoftmaxModel train(const LabeledDataset& dataset, const TrainConfig& cfg);

std::vector<double> logits(const SoftmaxModel& model, std::span<const double> features);

/// Argmax of the logits; ties go to the lowest class index.
int predict(const SoftmaxModel& model, const RasterImage& image);

struct Evaluation {
  double accuracy = 0.0;  // percent
  std::vector<PredictionRecord> records;
};

/// Throws DimensionError when the images do not match the model.
Evaluation evaluate(const SoftmaxModel& model, const LabeledDataset& group, int group_id);

/// Loads one group of a generated suite and evaluates it. Dimension errors
/// name the group.
Evaluation evaluate_group(const SoftmaxModel& model, const std::filesystem::path& suite_dir,
                          const SuiteManifest& manifest, const GroupSpec& group);

/// Worst relative error between the analytic gradient and central finite
/// differences (step 1e-5) over `samples` seeded parameter picks plus every
/// bias entry. Relative error is |a - n| / max(|a| + |n|, 1e-8).
double gradient_check(const SoftmaxModel& model, const FeatureBatch& batch, double l2,
                      std::size_t samples = 200, std::uint64_t seed = 0);

struct ProtocolConfig {
  /// Images each training set is built from, before corruption.
  std::size_t train_images = 500;
  std::size_t test_images_per_group = 500;
  /// Permutation seed shared by the training and test windows, which are
  /// disjoint slices of one permutation.
  std::uint64_t sampling_seed = 0;
  std::uint64_t train_corruption_seed = 1;
  std::uint64_t test_corruption_seed = 2;
  TrainConfig train;
};

/// The nine training conditions of the benchmark protocol: clean plus the
/// eight corrupted sets (SP0.1, GA0.1, SP0.1GA0.1, GA0.1SP0.1, SP0.1RL30,
/// SP0.1RR30, RL30, RR30).
const std::vector<std::string>& protocol_training_groups();

/// Trains one model per training group on a corrupted copy of the training
/// window and tests each on all 69 corrupted views of the test window, all in
/// memory. Summaries use the clean-trained run as reference, so
/// `training_groups` must include "clean".
std::vector<RobustnessSummary> run_protocol(const LabeledDataset& dataset, const ProtocolConfig& cfg,
                                            std::span<const std::string> training_groups,
                                            const std::string& classifier_name = "Softmax");

/// Binary layout, all integers little-endian:
///   "PBSM" | u32 version=1 | u32 width | u32 height | u32 channels |
///   u32 classes | u32 name length | name bytes |
///   f64 weights[classes*features] | f64 bias[classes]
void save_model(const SoftmaxModel& model, const std::filesystem::path& path);
SoftmaxModel load_model(const std::filesystem::path& path);

}  // namespace perturbench
