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

#include "perturbench/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>

#include "perturbench/error.hpp"
#include "perturbench/image_io.hpp"
#include "perturbench/suite.hpp"

namespace perturbench {
namespace {

using nlohmann::json;

template <typename T>
T parse_field(std::string_view field, std::size_t line_no, std::string_view name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw FormatError("predictions line " + std::to_string(line_no) + ": bad " + std::string(name) +
                      " '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

json category_to_json(const std::optional<CategoryStats>& stats) {
  if (!stats) return nullptr;
  return {{"runs", stats->runs},
          {"mean_cv", stats->mean_cv},
          {"mean_mean_accu", stats->mean_mean_accu},
          {"mean_min_accu", stats->mean_min_accu},
          {"mean_max_accu", stats->mean_max_accu}};
}

}  // namespace

std::vector<PredictionRecord> parse_predictions_csv(std::string_view text, int group_count) {
  std::vector<PredictionRecord> records;
  std::set<std::pair<int, std::size_t>> seen;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    if (!header_seen) {
      if (line != kPredictionsHeader) {
        throw FormatError("predictions CSV must start with '" + std::string(kPredictionsHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 4) {
      throw FormatError("predictions line " + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }
    PredictionRecord r;
    r.group_id = parse_field<int>(fields[0], line_no, "group_id");
    r.image_index = parse_field<std::size_t>(fields[1], line_no, "image_index");
    r.true_label = parse_field<int>(fields[2], line_no, "true_label");
    r.predicted_label = parse_field<int>(fields[3], line_no, "predicted_label");
    if (r.group_id < 1 || r.group_id > group_count) {
      throw ValidationError("predictions line " + std::to_string(line_no) + ": unknown group_id " +
                            std::to_string(r.group_id));
    }
    if (r.true_label < 0 || r.predicted_label < 0) {
      throw ValidationError("predictions line " + std::to_string(line_no) + ": negative label");
    }
    if (!seen.emplace(r.group_id, r.image_index).second) {
      throw ValidationError("duplicate prediction for (group " + std::to_string(r.group_id) +
                            ", index " + std::to_string(r.image_index) + ")");
    }
    records.push_back(r);
  }
  if (!header_seen) throw FormatError("predictions CSV is empty");
  return records;
}

std::vector<PredictionRecord> ingest_predictions(const std::filesystem::path& path, int group_count) {
  const auto bytes = read_file(path);
  return parse_predictions_csv({reinterpret_cast<const char*>(bytes.data()), bytes.size()}, group_count);
}

void write_predictions_csv(std::span<const PredictionRecord> records, std::ostream& out) {
  out << kPredictionsHeader << '\n';
  for (const auto& r : records) {
    out << r.group_id << ',' << r.image_index << ',' << r.true_label << ',' << r.predicted_label << '\n';
  }
}

std::vector<GroupTally> tally_by_group(std::span<const PredictionRecord> records, int group_count) {
  std::vector<GroupTally> tallies(static_cast<std::size_t>(group_count));
  for (const auto& r : records) {
    if (r.group_id < 1 || r.group_id > group_count) {
      throw ValidationError("unknown group_id " + std::to_string(r.group_id));
    }
    auto& t = tallies[static_cast<std::size_t>(r.group_id - 1)];
    ++t.total;
    if (r.true_label == r.predicted_label) ++t.correct;
  }
  return tallies;
}

std::vector<double> accuracy_by_group(std::span<const PredictionRecord> records, int group_count) {
  const auto tallies = tally_by_group(records, group_count);
  std::vector<double> accuracies;
  accuracies.reserve(tallies.size());
  for (std::size_t k = 0; k < tallies.size(); ++k) {
    if (tallies[k].total == 0) {
      throw ValidationError("no predictions for group " + std::to_string(k + 1));
    }
    accuracies.push_back(100.0 * static_cast<double>(tallies[k].correct) /
                         static_cast<double>(tallies[k].total));
  }
  return accuracies;
}

std::string_view to_string(TrainingCategory category) {
  switch (category) {
    case TrainingCategory::kClean: return "CLEAN";
    case TrainingCategory::kSingleFactor: return "SINGLE_FACTOR";
    case TrainingCategory::kTwoFactor: return "TWO_FACTOR";
  }
  return "CLEAN";
}

TrainingCategory category_from_string(std::string_view text) {
  for (auto c : {TrainingCategory::kClean, TrainingCategory::kSingleFactor, TrainingCategory::kTwoFactor}) {
    if (to_string(c) == text) return c;
  }
  throw FormatError("unknown training category '" + std::string(text) + "'");
}

TrainingCategory category_of(const PerturbationChain& chain) {
  switch (chain.size()) {
    case 0: return TrainingCategory::kClean;
    case 1: return TrainingCategory::kSingleFactor;
    case 2: return TrainingCategory::kTwoFactor;
    default:
      throw DomainError("training chains longer than two steps have no category");
  }
}

TrainingCategory category_of_group_name(std::string_view name) {
  return category_of(parse_chain_name(name));
}

ClassifierRun make_run(std::string classifier_name, std::string training_group,
                       std::vector<double> accuracies) {
  ClassifierRun run;
  run.classifier_name = std::move(classifier_name);
  run.training_group = std::move(training_group);
  run.group_ids.resize(accuracies.size());
  for (std::size_t k = 0; k < accuracies.size(); ++k) run.group_ids[k] = static_cast<int>(k) + 1;
  run.accuracy = AccuracyVector(std::move(accuracies));
  return run;
}

std::string RobustnessSummary::label() const { return classifier_name + "(" + training_group + ")"; }

RobustnessSummary summarize(const ClassifierRun& run, const ReferencePoint& ref) {
  if (run.group_ids.size() != run.accuracy.size()) {
    throw ValidationError("run " + run.classifier_name + ": group ids and accuracies differ in length");
  }
  const auto clean = std::find(run.group_ids.begin(), run.group_ids.end(), kCleanGroupId);
  if (clean == run.group_ids.end()) {
    throw ValidationError("run " + run.classifier_name + "(" + run.training_group +
                          ") has no clean test group");
  }
  const auto values = run.accuracy.values();
  RobustnessSummary s;
  s.classifier_name = run.classifier_name;
  s.training_group = run.training_group;
  s.training_category = run.training_category();
  s.mean_accu = mean_accuracy(run.accuracy);
  s.cv = cv_of_classifier(run.accuracy);
  s.clean_accu = values[static_cast<std::size_t>(clean - run.group_ids.begin())];
  s.min_accu = *std::min_element(values.begin(), values.end());
  s.max_accu = *std::max_element(values.begin(), values.end());
  s.quadrant = identify_group(s.mean_accu, s.cv, ref);
  s.accuracies.assign(values.begin(), values.end());
  return s;
}

RobustnessSummary summarize_as_reference(const ClassifierRun& run) {
  const ReferencePoint self{mean_accuracy(run.accuracy), cv_of_classifier(run.accuracy)};
  return summarize(run, self);
}

void assign_quadrants(std::span<RobustnessSummary> summaries) {
  std::map<std::string, ReferencePoint> references;
  for (const auto& s : summaries) {
    if (s.training_group == "clean") references.emplace(s.classifier_name, s.reference());
  }
  for (auto& s : summaries) {
    if (const auto it = references.find(s.classifier_name); it != references.end()) {
      s.quadrant = identify_group(s.mean_accu, s.cv, it->second);
    }
  }
}

const CategoryStats& AggregateAnalysis::at(TrainingCategory category) const {
  const auto& slot = categories[static_cast<std::size_t>(category)];
  if (!slot) throw DomainError("no runs in category " + std::string(to_string(category)));
  return *slot;
}

AggregateAnalysis aggregate(std::span<const RobustnessSummary> summaries) {
  if (summaries.empty()) throw DomainError("aggregate needs at least one run");
  std::array<std::vector<const RobustnessSummary*>, 3> buckets;
  for (const auto& s : summaries) buckets[static_cast<std::size_t>(s.training_category)].push_back(&s);

  AggregateAnalysis analysis;
  for (std::size_t c = 0; c < buckets.size(); ++c) {
    if (buckets[c].empty()) continue;
    std::vector<double> cvs, means, mins, maxs;
    for (const auto* s : buckets[c]) {
      cvs.push_back(s->cv);
      means.push_back(s->mean_accu);
      mins.push_back(s->min_accu);
      maxs.push_back(s->max_accu);
    }
    analysis.categories[c] = CategoryStats{buckets[c].size(), mean(cvs), mean(means), mean(mins), mean(maxs)};
  }
  const auto& single = analysis.categories[static_cast<std::size_t>(TrainingCategory::kSingleFactor)];
  const auto& two = analysis.categories[static_cast<std::size_t>(TrainingCategory::kTwoFactor)];
  if (single && two && two->mean_cv != 0.0) {
    analysis.cv_reduction_percent = 100.0 * (single->mean_cv - two->mean_cv) / two->mean_cv;
  }
  return analysis;
}

CorrelationTable correlate(std::span<const RobustnessSummary> summaries) {
  std::vector<double> cvs, means, cleans;
  for (const auto& s : summaries) {
    cvs.push_back(s.cv);
    means.push_back(s.mean_accu);
    cleans.push_back(s.clean_accu);
  }
  return {{pearson(cvs, means), spearman(cvs, means)},
          {pearson(cvs, cleans), spearman(cvs, cleans)},
          {pearson(means, cleans), spearman(means, cleans)}};
}

nlohmann::json to_json(const RobustnessSummary& s) {
  json doc = {{"classifier_name", s.classifier_name},
              {"training_group", s.training_group},
              {"training_category", to_string(s.training_category)},
              {"mean_accu", s.mean_accu},
              {"cv", s.cv},
              {"clean_accu", s.clean_accu},
              {"min_accu", s.min_accu},
              {"max_accu", s.max_accu},
              {"quadrant", to_string(s.quadrant)}};
  if (!s.accuracies.empty()) doc["accuracies"] = s.accuracies;
  return doc;
}

RobustnessSummary summary_from_json(const nlohmann::json& doc) {
  try {
    RobustnessSummary s;
    s.classifier_name = doc.at("classifier_name").get<std::string>();
    s.training_group = doc.at("training_group").get<std::string>();
    s.training_category = doc.contains("training_category")
                              ? category_from_string(doc.at("training_category").get<std::string>())
                              : category_of_group_name(s.training_group);
    s.mean_accu = doc.at("mean_accu").get<double>();
    s.cv = doc.at("cv").get<double>();
    s.clean_accu = doc.at("clean_accu").get<double>();
    s.min_accu = doc.at("min_accu").get<double>();
    s.max_accu = doc.at("max_accu").get<double>();
    s.quadrant = quadrant_from_string(doc.at("quadrant").get<std::string>());
    if (doc.contains("accuracies")) s.accuracies = doc.at("accuracies").get<std::vector<double>>();
    if (s.training_category != category_of_group_name(s.training_group)) {
      throw ValidationError(s.label() + ": training_category disagrees with the training group");
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("summary: ") + e.what());
  }
}

nlohmann::json to_json(const AggregateAnalysis& analysis) {
  json categories = json::object();
  for (auto c : {TrainingCategory::kClean, TrainingCategory::kSingleFactor, TrainingCategory::kTwoFactor}) {
    categories[std::string(to_string(c))] = category_to_json(analysis.categories[static_cast<std::size_t>(c)]);
  }
  json doc = {{"categories", std::move(categories)}};
  doc["cv_reduction_percent"] =
      analysis.cv_reduction_percent ? json(*analysis.cv_reduction_percent) : json(nullptr);
  return doc;
}

nlohmann::json to_json(const CorrelationTable& table) {
  auto pair = [](const CorrelationPair& p) { return json{{"pearson", p.pearson}, {"spearman", p.spearman}}; };
  return {{"cv_mean", pair(table.cv_mean)},
          {"cv_clean", pair(table.cv_clean)},
          {"mean_clean", pair(table.mean_clean)}};
}

nlohmann::json report_to_json(const ReportDocument& report) {
  json summaries = json::array();
  for (const auto& s : report.summaries) summaries.push_back(to_json(s));
  json doc = {{"spec_version", report.spec_version}, {"config", report.config}, {"summaries", std::move(summaries)}};
  if (report.aggregate) doc["aggregate"] = to_json(*report.aggregate);
  if (report.correlations) doc["correlations"] = to_json(*report.correlations);
  return doc;
}

ReportDocument report_from_json(const nlohmann::json& doc) {
  ReportDocument report;
  try {
    report.spec_version = doc.at("spec_version").get<std::string>();
    if (doc.contains("config")) report.config = doc.at("config");
    for (const auto& s : doc.at("summaries")) report.summaries.push_back(summary_from_json(s));
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  return report;
}

void write_report(const ReportDocument& report, const std::filesystem::path& path) {
  const std::string text = report_to_json(report).dump(2) + "\n";
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

ReportDocument load_report(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded()) throw FormatError(path.string() + ": not valid JSON");
  try {
    return report_from_json(doc);
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace perturbench
