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

#include <filesystem>
#include <regex>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "crowdmarl/errors.h"
#include "test_util.h"

namespace crowdmarl {
namespace {

namespace fs = std::filesystem;

RunRecord Record(int episodes, int agents, double scale) {
  RunRecord r;
  r.episode_payoffs.resize(episodes, agents);
  for (int e = 0; e < episodes; ++e) {
    for (int i = 0; i < agents; ++i) r.episode_payoffs(e, i) = scale * (e - 3.0 * i) + 0.25 * e * e;
  }
  return r;
}

// The band polygon lists the upper edge left to right, then the lower edge
// right to left.
std::vector<std::string> BandPoints(const std::string& svg) {
  const std::regex re("<polygon points=\"([^\"]*)\"");
  std::smatch m;
  EXPECT_TRUE(std::regex_search(svg, m, re));
  std::vector<std::string> points;
  std::istringstream in(m[1].str());
  for (std::string p; in >> p;) points.push_back(p);
  return points;
}

TEST(EmitPlotsTest, OneFilePerAgent) {
  const auto dir = testing::TempDir();
  const auto files = EmitPlots({Record(12, 2, 1.0), Record(12, 2, 2.0)}, dir.string());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(fs::path(files[0]).filename(), "agent_0_payoff.svg");
  EXPECT_EQ(fs::path(files[1]).filename(), "agent_1_payoff.svg");
  for (const auto& f : files) {
    const std::string svg = testing::ReadFile(f);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
    EXPECT_NE(svg.find("training episode"), std::string::npos);
    EXPECT_NE(svg.find("episode payoff"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}

TEST(EmitPlotsTest, SingleRunHasZeroWidthBand) {
  const auto dir = testing::TempDir();
  const auto files = EmitPlots({Record(8, 1, 1.5)}, dir.string());
  const std::vector<std::string> points = BandPoints(testing::ReadFile(files[0]));
  ASSERT_EQ(points.size(), 16u);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(points[k], points[15 - k]);
}

TEST(EmitPlotsTest, EmptyInputIsAnError) {
  const auto dir = testing::TempDir();
  try {
    EmitPlots({}, dir.string());
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_STREQ(e.what(), "no data");
  }
  try {
    EmitPlots({Record(0, 2, 1.0)}, dir.string());
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_STREQ(e.what(), "no data");
  }
}

TEST(EmitPlotsTest, ByteDeterministic) {
  const auto a = testing::TempDir() / "a";
  const auto b = a.parent_path() / "b";
  const std::vector<RunRecord> records = {Record(30, 3, 0.7), Record(30, 3, -1.1),
                                          Record(30, 3, 2.3)};
  const auto fa = EmitPlots(records, a.string());
  const auto fb = EmitPlots(records, b.string());
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(testing::ReadFile(fa[i]), testing::ReadFile(fb[i]));
  }
}

TEST(EmitPlotsTest, UnwritableDirectoryIsIoError) {
  const auto dir = testing::TempDir();
  testing::WriteFile(dir / "file", "x");
  EXPECT_THROW(EmitPlots({Record(3, 1, 1.0)}, (dir / "file" / "sub").string()), IoError);
}

TEST(RenderBandChartSvgTest, EscapesTextAndChecksLengths) {
  BandChart chart;
  chart.title = "a < b & c";
  chart.x = {1, 2};
  chart.mean = {0, 1};
  chart.lower = {0, 1};
  chart.upper = {0, 1};
  const std::string svg = RenderBandChartSvg(chart);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  chart.upper.pop_back();
  EXPECT_THROW(RenderBandChartSvg(chart), ShapeError);
}

}  // namespace
}  // namespace crowdmarl
