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

#include "perturbench/mcvplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "perturbench/error.hpp"

namespace perturbench {
namespace {

constexpr double kAutoPad = 0.05;
constexpr int kTicks = 5;

std::string num(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  std::string text(buffer);
  if (text == "-0.00") text = "0.00";
  return text;
}

std::string escape_xml(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

AxisRange padded(double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0.0) {
    // Single value: pad by 5% of its magnitude, at least one unit.
    const double pad = std::max(kAutoPad * std::abs(hi), 1.0);
    return {lo - pad, hi + pad};
  }
  return {lo - kAutoPad * span, hi + kAutoPad * span};
}

void check_finite(const McvPoint& p) {
  for (const double v : {p.cv, p.mean_accu, p.min_accu, p.max_accu, p.clean_accu}) {
    if (!std::isfinite(v)) throw DomainError("point '" + p.label + "' has a non-finite coordinate");
  }
}

bool contains(const AxisRange& r, double v) { return v >= r.lo && v <= r.hi; }

const McvPoint& the_reference(std::span<const McvPoint> points) {
  const McvPoint* reference = nullptr;
  for (const auto& p : points) {
    if (!p.is_reference) continue;
    if (reference) throw DomainError("mCV plot has more than one reference point");
    reference = &p;
  }
  if (!reference) throw DomainError("mCV plot needs exactly one reference point");
  return *reference;
}

}  // namespace

McvPoint to_mcv_point(const RobustnessSummary& s, bool is_reference) {
  return {s.label(), s.cv, s.mean_accu, s.min_accu, s.max_accu, s.clean_accu, is_reference};
}

PlotGeometry PlotGeometry::fit(std::span<const McvPoint> points, const PlotStyle& style) {
  if (points.empty()) throw DomainError("mCV plot needs at least one point");
  if (style.width <= 0 || style.height <= 0) throw DomainError("canvas size must be positive");
  PlotGeometry g;
  g.left_ = style.margin_left;
  g.right_ = style.width - style.margin_right;
  g.top_ = style.margin_top;
  g.bottom_ = style.height - style.margin_bottom;
  if (g.right_ <= g.left_ || g.bottom_ <= g.top_) throw DomainError("margins leave no plot area");

  double cv_lo = std::numeric_limits<double>::infinity();
  double cv_hi = -cv_lo;
  double acc_lo = cv_lo;
  double acc_hi = -cv_lo;
  for (const auto& p : points) {
    check_finite(p);
    cv_lo = std::min(cv_lo, p.cv);
    cv_hi = std::max(cv_hi, p.cv);
    std::vector<double> ys = {p.mean_accu};
    if (style.whiskers) ys.insert(ys.end(), {p.min_accu, p.max_accu});
    if (style.clean_ring) ys.push_back(p.clean_accu);
    for (const double y : ys) {
      acc_lo = std::min(acc_lo, y);
      acc_hi = std::max(acc_hi, y);
    }
  }
  g.cv_range_ = style.cv_range.value_or(padded(cv_lo, cv_hi));
  g.accu_range_ = style.accu_range.value_or(padded(acc_lo, acc_hi));
  if (!(g.cv_range_.hi > g.cv_range_.lo) || !(g.accu_range_.hi > g.accu_range_.lo)) {
    throw DomainError("axis ranges must have positive extent");
  }
  if (!contains(g.cv_range_, cv_lo) || !contains(g.cv_range_, cv_hi) ||
      !contains(g.accu_range_, acc_lo) || !contains(g.accu_range_, acc_hi)) {
    throw DomainError("fixed axis range does not contain every point");
  }
  return g;
}

double PlotGeometry::x_of(double cv) const {
  return left_ + (cv - cv_range_.lo) / (cv_range_.hi - cv_range_.lo) * (right_ - left_);
}

double PlotGeometry::y_of(double accu) const {
  return top_ + (accu_range_.hi - accu) / (accu_range_.hi - accu_range_.lo) * (bottom_ - top_);
}

QuadrantLabel screen_quadrant(const PlotGeometry& geometry, const McvPoint& point,
                              const McvPoint& reference) {
  const bool left = geometry.x_of(point.cv) <= geometry.x_of(reference.cv);
  const bool up = geometry.y_of(point.mean_accu) <= geometry.y_of(reference.mean_accu);
  if (up) return left ? QuadrantLabel::kGroupI : QuadrantLabel::kGroupII;
  return left ? QuadrantLabel::kGroupIII : QuadrantLabel::kGroupIV;
}

QuadrantLabel quadrant_of_rendered_point(const McvPoint& point, const McvPoint& reference) {
  return identify_group(point.mean_accu, point.cv, {reference.mean_accu, reference.cv});
}

std::string render_mcv(std::span<const McvPoint> points, const PlotStyle& style) {
  const McvPoint& reference = the_reference(points);
  const auto g = PlotGeometry::fit(points, style);
  const std::string font = " font-family=\"sans-serif\" font-size=\"" + std::to_string(style.font_size) + "\"";

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) +
         " " + std::to_string(style.height) + "\">\n";
  svg += "<rect x=\"0.00\" y=\"0.00\" width=\"" + num(style.width) + "\" height=\"" + num(style.height) +
         "\" fill=\"#ffffff\"/>\n";
  svg += "<rect class=\"frame\" x=\"" + num(g.left()) + "\" y=\"" + num(g.top()) + "\" width=\"" +
         num(g.right() - g.left()) + "\" height=\"" + num(g.bottom() - g.top()) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.00\"/>\n";
  if (!style.title.empty()) {
    svg += "<text x=\"" + num((g.left() + g.right()) / 2) + "\" y=\"" + num(g.top() / 2 + style.font_size / 2.0) +
           "\" text-anchor=\"middle\"" + font + ">" + escape_xml(style.title) + "</text>\n";
  }

  // Ticks.
  for (int i = 0; i <= kTicks; ++i) {
    const double t = static_cast<double>(i) / kTicks;
    const double cv = g.cv_range().lo + t * (g.cv_range().hi - g.cv_range().lo);
    const double x = g.x_of(cv);
    svg += "<line class=\"tick\" x1=\"" + num(x) + "\" y1=\"" + num(g.bottom()) + "\" x2=\"" + num(x) +
           "\" y2=\"" + num(g.bottom() + 5) + "\" stroke=\"#000000\" stroke-width=\"1.00\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(g.bottom() + 8 + style.font_size) +
           "\" text-anchor=\"middle\"" + font + ">" + num(cv) + "</text>\n";
    const double acc = g.accu_range().lo + t * (g.accu_range().hi - g.accu_range().lo);
    const double y = g.y_of(acc);
    svg += "<line class=\"tick\" x1=\"" + num(g.left() - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(g.left()) +
           "\" y2=\"" + num(y) + "\" stroke=\"#000000\" stroke-width=\"1.00\"/>\n";
    svg += "<text x=\"" + num(g.left() - 8) + "\" y=\"" + num(y + style.font_size / 3.0) +
           "\" text-anchor=\"end\"" + font + ">" + num(acc) + "</text>\n";
  }
  svg += "<text x=\"" + num((g.left() + g.right()) / 2) + "\" y=\"" + num(style.height - 12.0) +
         "\" text-anchor=\"middle\"" + font + ">Coefficient of variation (%)</text>\n";
  svg += "<text x=\"" + num(16.0) + "\" y=\"" + num((g.top() + g.bottom()) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 " + num(16.0) + " " + num((g.top() + g.bottom()) / 2) +
         ")\"" + font + ">Mean accuracy (%)</text>\n";

  // Dividers through the reference point.
  const double rx = g.x_of(reference.cv);
  const double ry = g.y_of(reference.mean_accu);
  svg += "<line class=\"divider\" x1=\"" + num(rx) + "\" y1=\"" + num(g.top()) + "\" x2=\"" + num(rx) +
         "\" y2=\"" + num(g.bottom()) + "\" stroke=\"" + style.divider_color +
         "\" stroke-width=\"1.00\" stroke-dasharray=\"6,4\"/>\n";
  svg += "<line class=\"divider\" x1=\"" + num(g.left()) + "\" y1=\"" + num(ry) + "\" x2=\"" + num(g.right()) +
         "\" y2=\"" + num(ry) + "\" stroke=\"" + style.divider_color +
         "\" stroke-width=\"1.00\" stroke-dasharray=\"6,4\"/>\n";

  const double inset = 6.0;
  const double fs = style.font_size;
  struct Corner {
    const char* text;
    double x;
    double y;
    const char* anchor;
  };
  const Corner corners[] = {{"Group I", g.left() + inset, g.top() + inset + fs, "start"},
                            {"Group II", g.right() - inset, g.top() + inset + fs, "end"},
                            {"Group III", g.left() + inset, g.bottom() - inset, "start"},
                            {"Group IV", g.right() - inset, g.bottom() - inset, "end"}};
  for (const auto& c : corners) {
    svg += "<text class=\"quadrant\" x=\"" + num(c.x) + "\" y=\"" + num(c.y) + "\" text-anchor=\"" + c.anchor +
           "\" fill=\"#555555\"" + font + ">" + c.text + "</text>\n";
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const double x = g.x_of(p.cv);
    const double y = g.y_of(p.mean_accu);
    if (style.whiskers) {
      const double y_min = g.y_of(p.min_accu);
      const double y_max = g.y_of(p.max_accu);
      svg += "<line class=\"whisker\" x1=\"" + num(x) + "\" y1=\"" + num(y_min) + "\" x2=\"" + num(x) +
             "\" y2=\"" + num(y_max) + "\" stroke=\"" + style.whisker_color + "\" stroke-width=\"1.00\"/>\n";
      for (const double yc : {y_min, y_max}) {
        svg += "<line class=\"whisker-cap\" x1=\"" + num(x - 4) + "\" y1=\"" + num(yc) + "\" x2=\"" +
               num(x + 4) + "\" y2=\"" + num(yc) + "\" stroke=\"" + style.whisker_color +
               "\" stroke-width=\"1.00\"/>\n";
      }
    }
    if (style.clean_ring) {
      svg += "<circle class=\"clean\" cx=\"" + num(x) + "\" cy=\"" + num(g.y_of(p.clean_accu)) +
             "\" r=\"6.00\" fill=\"none\" stroke=\"" + style.ring_color + "\" stroke-width=\"1.50\"/>\n";
    }
    if (p.is_reference) {
      svg += "<rect class=\"reference\" x=\"" + num(x - 5) + "\" y=\"" + num(y - 5) +
             "\" width=\"10.00\" height=\"10.00\" fill=\"" + style.reference_color + "\"/>\n";
    } else {
      svg += "<circle class=\"mean\" cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"4.00\" fill=\"" +
             style.marker_color + "\"/>\n";
    }
    // Label ladder: four vertical offsets cycled by point index.
    const double dy = -8.0 + static_cast<double>(i % 4) * (fs * 0.9);
    svg += "<text class=\"label\" x=\"" + num(x + 8) + "\" y=\"" + num(y + dy) + "\"" + font + ">" +
           escape_xml(p.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace perturbench
