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

#include "perturbench/baseline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "perturbench/error.hpp"
#include "perturbench/image_io.hpp"
#include "perturbench/random.hpp"

namespace perturbench {
namespace {

constexpr std::uint64_t kInitStreamTag = 0x494e4954;     // "INIT"
constexpr std::uint64_t kShuffleStreamTag = 0x53485546;  // "SHUF"
constexpr std::uint64_t kCheckStreamTag = 0x4752434b;    // "GRCK"
constexpr std::uint32_t kModelVersion = 1;
constexpr double kFiniteDifferenceStep = 1e-5;

void softmax_in_place(std::vector<double>& z) {
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (auto& v : z) {
    v = std::exp(v - peak);
    total += v;
  }
  for (auto& v : z) v /= total;
}

// Adds the data term of the loss over `rows` to `grad` (unnormalized) and
// returns the summed cross-entropy.
double accumulate(const SoftmaxModel& model, const FeatureBatch& batch,
                  std::span<const std::size_t> rows, LossGradient* grad) {
  const std::size_t f = model.features();
  double loss = 0.0;
  std::vector<double> z;
  for (const auto r : rows) {
    const auto x = batch.row(r);
    z = logits(model, x);
    const int y = batch.labels[r];
    const double peak = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (const double v : z) total += std::exp(v - peak);
    loss += std::log(total) + peak - z[static_cast<std::size_t>(y)];
    if (!grad) continue;
    softmax_in_place(z);
    z[static_cast<std::size_t>(y)] -= 1.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double g = z[k];
      grad->bias[k] += g;
      double* w = grad->weights.data() + k * f;
      for (std::size_t j = 0; j < f; ++j) w[j] += g * x[j];
    }
  }
  return loss;
}

LossGradient loss_over(const SoftmaxModel& model, const FeatureBatch& batch,
                       std::span<const std::size_t> rows, double l2, bool with_gradient) {
  LossGradient out;
  if (with_gradient) {
    out.weights.assign(model.weights.size(), 0.0);
    out.bias.assign(model.bias.size(), 0.0);
  }
  const double m = static_cast<double>(rows.size());
  out.loss = accumulate(model, batch, rows, with_gradient ? &out : nullptr) / m;
  double norm = 0.0;
  for (const double w : model.weights) norm += w * w;
  out.loss += 0.5 * l2 * norm;
  if (with_gradient) {
    for (std::size_t i = 0; i < out.weights.size(); ++i) out.weights[i] = out.weights[i] / m + l2 * model.weights[i];
    for (auto& b : out.bias) b /= m;
  }
  return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void check_shape(const SoftmaxModel& model, const RasterImage& image) {
  if (image.width() != model.width || image.height() != model.height || image.channels() != model.channels) {
    throw DimensionError("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) + "x" +
                         std::to_string(image.channels()) + " but the model expects " +
                         std::to_string(model.width) + "x" + std::to_string(model.height) + "x" +
                         std::to_string(model.channels));
  }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("model file is truncated");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<double> image_features(const RasterImage& image) {
  std::vector<double> features(image.bytes().size());
  std::transform(image.bytes().begin(), image.bytes().end(), features.begin(),
                 [](std::uint8_t v) { return v / 255.0; });
  return features;
}

FeatureBatch make_batch(const LabeledDataset& dataset, std::span<const std::size_t> indices) {
  FeatureBatch batch;
  batch.rows = indices.size();
  batch.cols = static_cast<std::size_t>(dataset.width()) * dataset.height() * dataset.channels();
  batch.values.reserve(batch.rows * batch.cols);
  for (const auto i : indices) {
    const auto& image = dataset.image(i);
    for (const auto v : image.bytes()) batch.values.push_back(v / 255.0);
    batch.labels.push_back(dataset.label(i));
  }
  return batch;
}

FeatureBatch make_batch(const LabeledDataset& dataset) {
  const auto rows = all_rows(dataset.size());
  return make_batch(dataset, rows);
}

SoftmaxModel initialize_model(int classes, int width, int height, int channels, std::uint64_t seed) {
  if (classes < 2) throw DomainError("a classifier needs at least two classes");
  SoftmaxModel model;
  model.width = width;
  model.height = height;
  model.channels = channels;
  model.classes = classes;
  model.weights.resize(static_cast<std::size_t>(classes) * model.features());
  model.bias.assign(static_cast<std::size_t>(classes), 0.0);
  RandomStream stream(derive_stream_seed(seed, kInitStreamTag, 0, 0));
  for (auto& w : model.weights) w = 0.01 * stream.normal();
  return model;
}

LossGradient loss_and_gradient(const SoftmaxModel& model, const FeatureBatch& batch, double l2) {
  if (batch.rows == 0) throw DomainError("empty batch");
  if (batch.cols != model.features()) throw DimensionError("batch width differs from the model's feature count");
  const auto rows = all_rows(batch.rows);
  return loss_over(model, batch, rows, l2, true);
}

SoftmaxModel train(const LabeledDataset& dataset, const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || cfg.epochs < 0 || cfg.batch_size == 0 || !(cfg.l2 >= 0.0)) {
    throw DomainError("invalid training configuration");
  }
  if (dataset.empty()) throw DomainError("cannot train on an empty dataset");
  const std::set<int> present(dataset.labels().begin(), dataset.labels().end());
  if (dataset.class_count() < 2 || present.size() < 2) {
    throw DomainError("training needs examples from at least two classes");
  }

  SoftmaxModel model = initialize_model(static_cast<int>(dataset.class_count()), dataset.width(),
                                        dataset.height(), dataset.channels(), cfg.seed);
  const FeatureBatch batch = make_batch(dataset);
  auto order = all_rows(batch.rows);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    RandomStream stream(derive_stream_seed(cfg.seed, kShuffleStreamTag, static_cast<std::uint64_t>(epoch), 0));
    shuffle(order, stream);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const auto grad = loss_over(model, batch, rows, cfg.l2, true);
      for (std::size_t i = 0; i < model.weights.size(); ++i) model.weights[i] -= cfg.learning_rate * grad.weights[i];
      for (std::size_t k = 0; k < model.bias.size(); ++k) model.bias[k] -= cfg.learning_rate * grad.bias[k];
    }
  }
  return model;
}

std::vector<double> logits(const SoftmaxModel& model, std::span<const double> features) {
  const std::size_t f = model.features();
  if (features.size() != f) throw DimensionError("feature vector length differs from the model");
  std::vector<double> z(model.bias);
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double* w = model.weights.data() + k * f;
    double acc = 0.0;
    for (std::size_t j = 0; j < f; ++j) acc += w[j] * features[j];
    z[k] += acc;
  }
  return z;
}

int predict(const SoftmaxModel& model, const RasterImage& image) {
  check_shape(model, image);
  const auto z = logits(model, image_features(image));
  // max_element returns the first maximum, which is the lowest class index.
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

Evaluation evaluate(const SoftmaxModel& model, const LabeledDataset& group, int group_id) {
  Evaluation result;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const int predicted = predict(model, group.image(i));
    if (predicted == group.label(i)) ++correct;
    result.records.push_back({group_id, i, group.label(i), predicted});
  }
  result.accuracy = group.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(group.size());
  return result;
}

Evaluation evaluate_group(const SoftmaxModel& model, const std::filesystem::path& suite_dir,
                          const SuiteManifest& manifest, const GroupSpec& group) {
  const std::string where = "group " + group_directory_name(group);
  if (manifest.width != model.width || manifest.height != model.height || manifest.channels != model.channels) {
    throw DimensionError(where + ": images are " + std::to_string(manifest.width) + "x" +
                         std::to_string(manifest.height) + "x" + std::to_string(manifest.channels) +
                         " but the model expects " + std::to_string(model.width) + "x" +
                         std::to_string(model.height) + "x" + std::to_string(model.channels));
  }
  try {
    return evaluate(model, load_group(suite_dir, manifest, group), group.group_id);
  } catch (const DimensionError& e) {
    throw DimensionError(where + ": " + e.what());
  }
}

double gradient_check(const SoftmaxModel& model, const FeatureBatch& batch, double l2,
                      std::size_t samples, std::uint64_t seed) {
  const auto analytic = loss_and_gradient(model, batch, l2);
  const auto rows = all_rows(batch.rows);
  SoftmaxModel probe = model;

  auto relative = [](double a, double n) { return std::abs(a - n) / std::max(std::abs(a) + std::abs(n), 1e-8); };
  auto central = [&](double& parameter) {
    const double saved = parameter;
    parameter = saved + kFiniteDifferenceStep;
    const double up = loss_over(probe, batch, rows, l2, false).loss;
    parameter = saved - kFiniteDifferenceStep;
    const double down = loss_over(probe, batch, rows, l2, false).loss;
    parameter = saved;
    return (up - down) / (2.0 * kFiniteDifferenceStep);
  };

  double worst = 0.0;
  RandomStream stream(derive_stream_seed(seed, kCheckStreamTag, 0, 0));
  for (std::size_t s = 0; s < samples && !probe.weights.empty(); ++s) {
    const auto i = static_cast<std::size_t>(stream.uniform_index(probe.weights.size()));
    worst = std::max(worst, relative(analytic.weights[i], central(probe.weights[i])));
  }
  for (std::size_t k = 0; k < probe.bias.size(); ++k) {
    worst = std::max(worst, relative(analytic.bias[k], central(probe.bias[k])));
  }
  return worst;
}

const std::vector<std::string>& protocol_training_groups() {
  static const std::vector<std::string> groups = {"clean",     "SP0.1",     "GA0.1", "SP0.1GA0.1", "GA0.1SP0.1",
                                                  "SP0.1RL30", "SP0.1RR30", "RL30",  "RR30"};
  return groups;
}

std::vector<RobustnessSummary> run_protocol(const LabeledDataset& dataset, const ProtocolConfig& cfg,
                                            std::span<const std::string> training_groups,
                                            const std::string& classifier_name) {
  if (std::find(training_groups.begin(), training_groups.end(), "clean") == training_groups.end()) {
    throw DomainError("the protocol needs a clean training group as reference");
  }
  SuiteParams train_window;
  train_window.images_per_group = cfg.train_images;
  train_window.sampling_seed = cfg.sampling_seed;
  SuiteParams test_window = train_window;
  test_window.images_per_group = cfg.test_images_per_group;
  test_window.sample_offset = cfg.train_images;

  const auto train_source = dataset.subset(sample_indices(dataset.size(), train_window));
  const auto test_source = dataset.subset(sample_indices(dataset.size(), test_window));

  std::vector<LabeledDataset> test_groups;
  for (const auto& group : enumerate_groups()) {
    test_groups.push_back(corrupt_dataset(test_source, group, SeedSpec{cfg.test_corruption_seed}));
  }

  std::vector<ClassifierRun> runs;
  for (const auto& name : training_groups) {
    const auto& group = find_group(name);
    auto model = train(corrupt_dataset(train_source, group, SeedSpec{cfg.train_corruption_seed}), cfg.train);
    std::vector<double> accuracies;
    for (std::size_t k = 0; k < test_groups.size(); ++k) {
      accuracies.push_back(evaluate(model, test_groups[k], static_cast<int>(k) + 1).accuracy);
    }
    runs.push_back(make_run(classifier_name, name, std::move(accuracies)));
  }

  std::vector<RobustnessSummary> summaries;
  for (const auto& run : runs) summaries.push_back(summarize_as_reference(run));
  assign_quadrants(summaries);
  return summaries;
}

void save_model(const SoftmaxModel& model, const std::filesystem::path& path) {
  std::vector<std::uint8_t> out = {'P', 'B', 'S', 'M'};
  put_u32(out, kModelVersion);
  put_u32(out, static_cast<std::uint32_t>(model.width));
  put_u32(out, static_cast<std::uint32_t>(model.height));
  put_u32(out, static_cast<std::uint32_t>(model.channels));
  put_u32(out, static_cast<std::uint32_t>(model.classes));
  put_u32(out, static_cast<std::uint32_t>(model.training_group.size()));
  out.insert(out.end(), model.training_group.begin(), model.training_group.end());
  for (const double w : model.weights) put_f64(out, w);
  for (const double b : model.bias) put_f64(out, b);
  write_file(path, out);
}

SoftmaxModel load_model(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  Reader in(bytes);
  if (in.text(4) != "PBSM") throw FormatError(path.string() + ": not a model file");
  if (const auto version = in.u32(); version != kModelVersion) {
    throw FormatError(path.string() + ": unsupported model version " + std::to_string(version));
  }
  SoftmaxModel model;
  model.width = static_cast<int>(in.u32());
  model.height = static_cast<int>(in.u32());
  model.channels = static_cast<int>(in.u32());
  model.classes = static_cast<int>(in.u32());
  model.training_group = in.text(in.u32());
  if (model.width <= 0 || model.height <= 0 || (model.channels != 1 && model.channels != 3) || model.classes < 2) {
    throw FormatError(path.string() + ": invalid model dimensions");
  }
  model.weights.resize(static_cast<std::size_t>(model.classes) * model.features());
  model.bias.resize(static_cast<std::size_t>(model.classes));
  for (auto& w : model.weights) w = in.f64();
  for (auto& b : model.bias) b = in.f64();
  if (!in.done()) throw FormatError(path.string() + ": trailing bytes after model payload");
  return model;
}

}  // namespace perturbench
