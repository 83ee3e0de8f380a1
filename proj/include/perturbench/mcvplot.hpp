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

#include <optional>
#include <span>
#include <string>

#include "perturbench/report.hpp"
#include "perturbench/stats.hpp"

namespace perturbench {

/// One classifier on the mCV plane.
struct McvPoint {
  std::string label;
  double cv = 0.0;
  double mean_accu = 0.0;
  double min_accu = 0.0;
  double max_accu = 0.0;
  double clean_accu = 0.0;
  bool is_reference = false;
};

McvPoint to_mcv_point(const RobustnessSummary& summary, bool is_reference);

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct PlotStyle {
  int width = 800;
  int height = 600;
  int margin_left = 70;
  int margin_right = 30;
  int margin_top = 40;
  int margin_bottom = 60;
  /// Fixed ranges; auto-fit with 5% padding when absent.
  std::optional<AxisRange> cv_range;
  std::optional<AxisRange> accu_range;
  bool whiskers = true;
  bool clean_ring = true;
  int font_size = 12;
  std::string marker_color = "#1f4e9c";
  std::string reference_color = "#111111";
  std::string whisker_color = "#7a7a7a";
  std::string divider_color = "#b03030";
  std::string ring_color = "#d62728";
  std::string title;
};

/// Data-to-screen transform of one plot. X grows with CV, screen Y shrinks
/// as accuracy grows.
class PlotGeometry {
 public:
  /// Throws DomainError on non-positive canvas or empty plot area, or when a
  /// fixed range fails to contain every point.
  static PlotGeometry fit(std::span<const McvPoint> points, const PlotStyle& style);

  double x_of(double cv) const;
  double y_of(double accu) const;

  const AxisRange& cv_range() const { return cv_range_; }
  const AxisRange& accu_range() const { return accu_range_; }
  double left() const { return left_; }
  double right() const { return right_; }
  double top() const { return top_; }
  double bottom() const { return bottom_; }

 private:
  AxisRange cv_range_;
  AxisRange accu_range_;
  double left_ = 0.0;
  double right_ = 0.0;
  double top_ = 0.0;
  double bottom_ = 0.0;
};

/// Quadrant of `point` by its screen position relative to the reference's
/// dividers: left-or-on and up-or-on is Group I, and so on.
QuadrantLabel screen_quadrant(const PlotGeometry& geometry, const McvPoint& point,
                              const McvPoint& reference);

/// Same answer as identify_group for the point's (mean, CV).
QuadrantLabel quadrant_of_rendered_point(const McvPoint& point, const McvPoint& reference);

/// SVG 1.1 document. Requires exactly one reference point and finite
/// coordinates (DomainError otherwise). Output depends only on the inputs.
std::string render_mcv(std::span<const McvPoint> points, const PlotStyle& style);

}  // namespace perturbench
