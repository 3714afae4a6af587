// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_TOOLS_SVG_HPP_
#define AGFEM_TOOLS_SVG_HPP_

#include <string>
#include <vector>

namespace agfem::tools {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
  std::vector<Series> series;
};

// Standalone SVG with axes, decade ticks on log axes and one polyline with
// markers per series. Non-finite or non-positive (on log axes) points are
// skipped.
std::string render_svg(const LinePlot& plot);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace agfem::tools

#endif  // AGFEM_TOOLS_SVG_HPP_
