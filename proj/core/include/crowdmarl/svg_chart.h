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

#ifndef CROWDMARL_SVG_CHART_H_
#define CROWDMARL_SVG_CHART_H_

#include <string>
#include <vector>

#include "crowdmarl/experiment.h"

namespace crowdmarl {

// A mean line with a shaded [lower, upper] band around it.
struct BandChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
};

// Standalone SVG document. Output depends only on the chart contents, so
// identical inputs give identical bytes.
std::string RenderBandChartSvg(const BandChart& chart);

// One chart per agent: mean training payoff across runs, +- the variance
// across runs. Files are <out_dir>/agent_<i>_payoff.svg; returns their paths.
std::vector<std::string> EmitPlots(const std::vector<RunRecord>& records,
                                   const std::string& out_dir);

}  // namespace crowdmarl

#endif  // CROWDMARL_SVG_CHART_H_
