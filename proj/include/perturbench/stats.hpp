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

#include <span>
#include <string_view>
#include <vector>

namespace perturbench {

/// Accuracy percentages, one per test group. Non-empty, each in [0, 100].
class AccuracyVector {
 public:
  AccuracyVector() = default;
  explicit AccuracyVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

 private:
  std::vector<double> values_;
};

enum class QuadrantLabel { kGroupI, kGroupII, kGroupIII, kGroupIV };

/// "GROUP_I" .. "GROUP_IV".
std::string_view to_string(QuadrantLabel label);
QuadrantLabel quadrant_from_string(std::string_view text);

/// Mean accuracy and CV of the run that splits the mCV plane.
struct ReferencePoint {
  double mean_accu = 0.0;
  double cv = 0.0;
};

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

double mean(std::span<const double> values);

/// Population standard deviation (divides by n). Throws DomainError if empty.
double std_pop(std::span<const double> values);

/// 100 * std_pop / mean. Throws DomainError on empty input or zero mean.
double cv_percent(std::span<const double> values);

/// Plain mean over all n groups (divides by n, not n - 1).
double mean_accuracy(const AccuracyVector& accuracies);

double cv_of_classifier(const AccuracyVector& accuracies);

/// Ranks starting at 1; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation. Throws DomainError on length mismatch, n < 2 or a
/// constant input.
double pearson(std::span<const double> x, std::span<const double> y);

/// Spearman correlation as the Pearson correlation of average ranks. Equals
/// 1 - 6 sum(d^2) / (n (n^2 - 1)) when there are no ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Quadrant of (mean accuracy, CV) relative to `ref`:
///   I   MA >= rMA and CV <= rCV
///   II  MA >= rMA and CV >  rCV
///   III MA <  rMA and CV <= rCV
///   IV  otherwise
QuadrantLabel identify_group(double mean_accu, double cv, const ReferencePoint& ref);

}  // namespace perturbench
