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

// Self-contained SVG line charts: linear axes, one polyline per series,
// legend keyed by series name.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fairkm::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 800;
  int height = 600;
};

std::string render(const LineChart& chart);

std::string escape_xml(std::string_view text);

// Roughly `count` evenly spaced round tick values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int count);

}  // namespace fairkm::svg
