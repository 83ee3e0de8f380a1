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

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "perturbench/perturb.hpp"
#include "perturbench/stats.hpp"

namespace perturbench {

inline constexpr const char* kReportVersion = "1.0";
inline constexpr std::string_view kPredictionsHeader =
    "group_id,image_index,true_label,predicted_label";

struct PredictionRecord {
  int group_id = 0;
  std::size_t image_index = 0;
  int true_label = 0;
  int predicted_label = 0;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// Parses the predictions CSV. Group ids must lie in [1, group_count]; a
/// repeated (group_id, image_index) pair is a ValidationError naming it.
/// Row order does not matter.
std::vector<PredictionRecord> parse_predictions_csv(std::string_view text,
                                                    int group_count = 69);
std::vector<PredictionRecord> ingest_predictions(const std::filesystem::path& path,
                                                 int group_count = 69);

/// Header plus one LF-terminated row per record, in the given order.
void write_predictions_csv(std::span<const PredictionRecord> records, std::ostream& out);

struct GroupTally {
  std::size_t correct = 0;
  std::size_t total = 0;
};

/// Counts per group id; index k holds group k + 1.
std::vector<GroupTally> tally_by_group(std::span<const PredictionRecord> records, int group_count);

/// Percent correct per group id. Throws ValidationError if any group has no
/// records.
std::vector<double> accuracy_by_group(std::span<const PredictionRecord> records,
                                      int group_count = 69);

enum class TrainingCategory { kClean, kSingleFactor, kTwoFactor };

/// "CLEAN", "SINGLE_FACTOR", "TWO_FACTOR".
std::string_view to_string(TrainingCategory category);
TrainingCategory category_from_string(std::string_view text);

/// By chain length: 0, 1 or 2. Longer chains are a DomainError.
TrainingCategory category_of(const PerturbationChain& chain);
TrainingCategory category_of_group_name(std::string_view name);

/// One classifier trained on one group and tested on every group.
struct ClassifierRun {
  std::string classifier_name;
  std::string training_group;
  std::vector<int> group_ids;  // parallel to accuracy
  AccuracyVector accuracy;

  TrainingCategory training_category() const { return category_of_group_name(training_group); }
};

/// Run over groups 1..n where accuracies[k] belongs to group k + 1.
ClassifierRun make_run(std::string classifier_name, std::string training_group,
                       std::vector<double> accuracies);

struct RobustnessSummary {
  std::string classifier_name;
  std::string training_group;
  TrainingCategory training_category = TrainingCategory::kClean;
  double mean_accu = 0.0;
  double cv = 0.0;
  double clean_accu = 0.0;
  double min_accu = 0.0;
  double max_accu = 0.0;
  QuadrantLabel quadrant = QuadrantLabel::kGroupI;
  /// Per-group accuracies when known; fixtures built from summary tables
  /// carry only the moments.
  std::vector<double> accuracies;

  /// "AlexNet(SP0.1RL30)".
  std::string label() const;
  ReferencePoint reference() const { return {mean_accu, cv}; }
};

/// Throws ValidationError when the run has no clean group.
RobustnessSummary summarize(const ClassifierRun& run, const ReferencePoint& ref);

/// Summarizes the run against itself; used for clean-trained runs.
RobustnessSummary summarize_as_reference(const ClassifierRun& run);

/// Recomputes every quadrant against the clean-trained summary of the same
/// classifier. Classifiers without a clean run keep their quadrant.
void assign_quadrants(std::span<RobustnessSummary> summaries);

struct CategoryStats {
  std::size_t runs = 0;
  double mean_cv = 0.0;
  double mean_mean_accu = 0.0;
  double mean_min_accu = 0.0;
  double mean_max_accu = 0.0;
};

struct AggregateAnalysis {
  std::array<std::optional<CategoryStats>, 3> categories;
  /// 100 * (single - two) / two over mean CVs; present when both exist.
  std::optional<double> cv_reduction_percent;

  /// Throws DomainError when no run of the category was supplied.
  const CategoryStats& at(TrainingCategory category) const;
};

/// Unweighted means per training category. Throws DomainError on no input.
AggregateAnalysis aggregate(std::span<const RobustnessSummary> summaries);

struct CorrelationPair {
  double pearson = 0.0;
  double spearman = 0.0;
};

/// Correlations across summaries for the three column pairs that the
/// benchmark tabulates.
struct CorrelationTable {
  CorrelationPair cv_mean;
  CorrelationPair cv_clean;
  CorrelationPair mean_clean;
};

CorrelationTable correlate(std::span<const RobustnessSummary> summaries);

struct ReportDocument {
  std::string spec_version = kReportVersion;
  nlohmann::json config = nlohmann::json::object();
  std::vector<RobustnessSummary> summaries;
  std::optional<AggregateAnalysis> aggregate;
  std::optional<CorrelationTable> correlations;
};

nlohmann::json to_json(const RobustnessSummary& summary);
RobustnessSummary summary_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AggregateAnalysis& analysis);
nlohmann::json to_json(const CorrelationTable& table);

nlohmann::json report_to_json(const ReportDocument& report);
ReportDocument report_from_json(const nlohmann::json& doc);

void write_report(const ReportDocument& report, const std::filesystem::path& path);
ReportDocument load_report(const std::filesystem::path& path);

}  // namespace perturbench
