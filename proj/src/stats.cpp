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

#include "perturbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "perturbench/error.hpp"

namespace perturbench {
namespace {

void require_non_empty(std::span<const double> values, const char* what) {
  if (values.empty()) throw DomainError(std::string(what) + " of an empty list");
}

void require_pairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DomainError("correlation inputs differ in length (" + std::to_string(x.size()) + " vs " +
                      std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw DomainError("correlation needs at least two pairs");
}

}  // namespace

AccuracyVector::AccuracyVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("accuracy vector is empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] >= 0.0 && values_[k] <= 100.0)) {
      throw DomainError("accuracy " + std::to_string(values_[k]) + " at position " +
                        std::to_string(k) + " is outside [0, 100]");
    }
  }
}

std::string_view to_string(QuadrantLabel label) {
  switch (label) {
    case QuadrantLabel::kGroupI: return "GROUP_I";
    case QuadrantLabel::kGroupII: return "GROUP_II";
    case QuadrantLabel::kGroupIII: return "GROUP_III";
    case QuadrantLabel::kGroupIV: return "GROUP_IV";
  }
  return "GROUP_IV";
}

QuadrantLabel quadrant_from_string(std::string_view text) {
  for (auto q : {QuadrantLabel::kGroupI, QuadrantLabel::kGroupII, QuadrantLabel::kGroupIII,
                 QuadrantLabel::kGroupIV}) {
    if (to_string(q) == text) return q;
  }
  throw DomainError("unknown quadrant '" + std::string(text) + "'");
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

double mean(std::span<const double> values) {
  require_non_empty(values, "mean");
  return compensated_sum(values) / static_cast<double>(values.size());
}

double std_pop(std::span<const double> values) {
  require_non_empty(values, "standard deviation");
  const double mu = mean(values);
  std::vector<double> squares(values.size());
  std::transform(values.begin(), values.end(), squares.begin(),
                 [mu](double v) { return (v - mu) * (v - mu); });
  return std::sqrt(compensated_sum(squares) / static_cast<double>(values.size()));
}

double cv_percent(std::span<const double> values) {
  require_non_empty(values, "coefficient of variation");
  const double mu = mean(values);
  if (mu == 0.0) throw DomainError("coefficient of variation is undefined for a zero mean");
  return 100.0 * std_pop(values) / mu;
}

double mean_accuracy(const AccuracyVector& accuracies) { return mean(accuracies.values()); }

double cv_of_classifier(const AccuracyVector& accuracies) { return cv_percent(accuracies.values()); }

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j; ties share their mean.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y);
  const double mx = mean(x);
  const double my = mean(y);
  std::vector<double> sxy(x.size());
  std::vector<double> sxx(x.size());
  std::vector<double> syy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy[i] = dx * dy;
    sxx[i] = dx * dx;
    syy[i] = dy * dy;
  }
  const double vx = compensated_sum(sxx);
  const double vy = compensated_sum(syy);
  if (vx == 0.0 || vy == 0.0) throw DomainError("Pearson correlation of a constant input");
  return compensated_sum(sxy) / (std::sqrt(vx) * std::sqrt(vy));
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

QuadrantLabel identify_group(double mean_accu, double cv, const ReferencePoint& ref) {
  if (mean_accu >= ref.mean_accu && cv <= ref.cv) return QuadrantLabel::kGroupI;
  if (mean_accu >= ref.mean_accu && cv > ref.cv) return QuadrantLabel::kGroupII;
  if (mean_accu < ref.mean_accu && cv <= ref.cv) return QuadrantLabel::kGroupIII;
  return QuadrantLabel::kGroupIV;
}

}  // namespace perturbench
