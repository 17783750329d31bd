/*
 * Copyright 2026 The FairKM Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairkm/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace fairkm::svg {
namespace {

constexpr std::array<std::string_view, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

constexpr int kLeft = 90;
constexpr int kRight = 170;  // room for the legend
constexpr int kTop = 50;
constexpr int kBottom = 70;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Degenerate or empty ranges get a unit-ish span so the mapping is defined.
  void settle() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    }
  }
};

std::string label(double v) {
  if (v == 0.0) return "0";
  return fmt::format("{:.4g}", v);
}

}  // namespace

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi, int count) {
  if (!(hi > lo) || count < 2) return {lo};
  const double raw = (hi - lo) / (count - 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step - 1e-9) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

std::string render(const LineChart& chart) {
  const int plot_w = chart.width - kLeft - kRight;
  const int plot_h = chart.height - kTop - kBottom;

  Range xr, yr;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.add(s.x[i]);
      yr.add(s.y[i]);
    }
  }
  xr.settle();
  yr.settle();
  const auto xticks = nice_ticks(xr.lo, xr.hi, 6);
  auto yticks = nice_ticks(yr.lo, yr.hi, 6);
  // Extend the y range to the enclosing ticks so lines never touch the frame.
  if (yticks.size() >= 2) {
    const double step = yticks[1] - yticks[0];
    if (yticks.front() > yr.lo) yticks.insert(yticks.begin(), yticks.front() - step);
    if (yticks.back() < yr.hi) yticks.push_back(yticks.back() + step);
    yr.lo = yticks.front();
    yr.hi = yticks.back();
  }

  auto px = [&](double x) {
    return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  auto py = [&](double y) {
    return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  std::string out;
  out += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      chart.width, chart.height);
  out += fmt::format(
      "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
      chart.width, chart.height);
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\">{}"
      "</text>\n",
      kLeft + plot_w / 2, kTop / 2 + 6, escape_xml(chart.title));

  // Grid and tick labels.
  out += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : xticks) {
    if (t < xr.lo || t > xr.hi) continue;
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" "
                       "y2=\"{2}\"/>\n",
                       px(t), kTop, kTop + plot_h);
  }
  for (double t : yticks) {
    out += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" "
                       "y2=\"{1:.2f}\"/>\n",
                       kLeft, py(t), kLeft + plot_w);
  }
  out += "</g>\n<g fill=\"#333333\">\n";
  for (double t : xticks) {
    if (t < xr.lo || t > xr.hi) continue;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}"
                       "</text>\n",
                       px(t), kTop + plot_h + 18, label(t));
  }
  for (double t : yticks) {
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}"
                       "</text>\n",
                       kLeft - 8, py(t) + 4, label(t));
  }
  out += "</g>\n";
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"#333333\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
      kLeft + plot_w / 2, chart.height - 20, escape_xml(chart.x_label));
  out += fmt::format(
      "<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 20 {0})\">{1}</text>\n",
      kTop + plot_h / 2, escape_xml(chart.y_label));

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& series = chart.series[s];
    const auto colour = kPalette[s % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < series.x.size() && i < series.y.size(); ++i) {
      if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
      if (!points.empty()) points.push_back(' ');
      points += fmt::format("{:.2f},{:.2f}", px(series.x[i]), py(series.y[i]));
    }
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
        "points=\"{}\"><title>{}</title></polyline>\n",
        colour, points, escape_xml(series.name));
    const int ly = kTop + 10 + static_cast<int>(s) * 20;
    const int lx = kLeft + plot_w + 15;
    out += fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        lx, ly, lx + 20, ly, colour);
    out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", lx + 26, ly + 4,
                       escape_xml(series.name));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace fairkm::svg
