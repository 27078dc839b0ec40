// Copyright 2026 The crowdmarl Authors.
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

#include "crowdmarl/svg_chart.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "crowdmarl/errors.h"

namespace crowdmarl {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  // Avoid "-0.00" so that tiny sign flips cannot change the bytes.
  if (std::string(buf) == "-0.00") return "0.00";
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` ticks.
double NiceStep(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

std::string TickLabel(double v, double step) {
  char buf[32];
  if (step >= 1.0) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else {
    const int digits = static_cast<int>(std::ceil(-std::log10(step)));
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  }
  std::string s = buf;
  if (s.size() > 1 && s[0] == '-' && std::all_of(s.begin() + 1, s.end(), [](char c) {
        return c == '0' || c == '.';
      })) {
    s.erase(0, 1);
  }
  return s;
}

}  // namespace

std::string RenderBandChartSvg(const BandChart& chart) {
  const std::size_t n = chart.x.size();
  if (n == 0) throw ContractViolation("no data");
  if (chart.mean.size() != n || chart.lower.size() != n || chart.upper.size() != n) {
    throw ShapeError("RenderBandChartSvg: series lengths differ");
  }
  double x_lo = *std::min_element(chart.x.begin(), chart.x.end());
  double x_hi = *std::max_element(chart.x.begin(), chart.x.end());
  double y_lo = *std::min_element(chart.lower.begin(), chart.lower.end());
  double y_hi = *std::max_element(chart.upper.begin(), chart.upper.end());
  y_lo = std::min(y_lo, *std::min_element(chart.mean.begin(), chart.mean.end()));
  y_hi = std::max(y_hi, *std::max_element(chart.mean.begin(), chart.mean.end()));
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double y_step = NiceStep(y_hi - y_lo, 6);
  y_lo = std::floor(y_lo / y_step) * y_step;
  y_hi = std::ceil(y_hi / y_step) * y_step;
  const double x_step = NiceStep(x_hi - x_lo, 8);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Fixed(kWidth) +
         "\" height=\"" + Fixed(kHeight) + "\" viewBox=\"0 0 " + Fixed(kWidth) +
         " " + Fixed(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + Fixed(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" "
         "font-size=\"15\">" + Escape(chart.title) + "</text>\n";

  // Grid and y ticks.
  for (double y = y_lo; y <= y_hi + 0.5 * y_step; y += y_step) {
    const std::string yy = Fixed(py(y));
    svg += "<line x1=\"" + Fixed(kLeft) + "\" y1=\"" + yy + "\" x2=\"" +
           Fixed(kLeft + plot_w) + "\" y2=\"" + yy +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + Fixed(kLeft - 6) + "\" y=\"" + Fixed(py(y) + 4) +
           "\" text-anchor=\"end\">" + TickLabel(y, y_step) + "</text>\n";
  }
  for (double x = std::ceil(x_lo / x_step) * x_step; x <= x_hi + 1e-9; x += x_step) {
    svg += "<text x=\"" + Fixed(px(x)) + "\" y=\"" + Fixed(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + TickLabel(x, x_step) + "</text>\n";
  }
  svg += "<rect x=\"" + Fixed(kLeft) + "\" y=\"" + Fixed(kTop) + "\" width=\"" +
         Fixed(plot_w) + "\" height=\"" + Fixed(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  std::string band;
  for (std::size_t i = 0; i < n; ++i) {
    band += Fixed(px(chart.x[i])) + "," + Fixed(py(chart.upper[i])) + " ";
  }
  for (std::size_t i = n; i-- > 0;) {
    band += Fixed(px(chart.x[i])) + "," + Fixed(py(chart.lower[i]));
    if (i > 0) band += " ";
  }
  svg += "<polygon points=\"" + band +
         "\" fill=\"#4878d0\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";

  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line += Fixed(px(chart.x[i])) + "," + Fixed(py(chart.mean[i]));
    if (i + 1 < n) line += " ";
  }
  svg += "<polyline points=\"" + line +
         "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"/>\n";

  svg += "<text x=\"" + Fixed(kLeft + plot_w / 2) + "\" y=\"" +
         Fixed(kHeight - 12) + "\" text-anchor=\"middle\">" +
         Escape(chart.x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + Fixed(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         Fixed(kTop + plot_h / 2) + ")\">" + Escape(chart.y_label) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::vector<std::string> EmitPlots(const std::vector<RunRecord>& records,
                                   const std::string& out_dir) {
  if (records.empty() || records.front().episode_payoffs.rows() == 0) {
    throw ContractViolation("no data");
  }
  const std::vector<AggregateRow> rows = Aggregate(records);
  const int agents = static_cast<int>(records.front().episode_payoffs.cols());
  const int episodes = static_cast<int>(records.front().episode_payoffs.rows());

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());

  std::vector<std::string> files;
  for (int i = 0; i < agents; ++i) {
    BandChart chart;
    chart.title = "Agent " + std::to_string(i) + ": episode payoff over " +
                  std::to_string(records.size()) + " run(s)";
    chart.x_label = "training episode";
    chart.y_label = "episode payoff (mean +- variance)";
    for (const AggregateRow& row : rows) {
      if (row.agent != i) continue;
      chart.x.push_back(static_cast<double>(row.episode + 1));
      chart.mean.push_back(row.mean);
      chart.lower.push_back(row.mean - row.variance);
      chart.upper.push_back(row.mean + row.variance);
    }
    if (static_cast<int>(chart.x.size()) != episodes) {
      throw ShapeError("EmitPlots: aggregate rows are incomplete");
    }
    const fs::path path = fs::path(out_dir) / ("agent_" + std::to_string(i) + "_payoff.svg");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << RenderBandChartSvg(chart);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
    files.push_back(path.string());
  }
  return files;
}

}  // namespace crowdmarl
