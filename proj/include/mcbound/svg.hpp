#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mcbound {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgOptions {
  std::string title;
  std::string x_label = "n";
  std::string y_label = "bound";
  bool log_x = true;
  int width = 720;
  int height = 480;
  /// Vertical marker, for example at a crossover.
  std::optional<double> marker_x;
};

/// Line chart with a log-scale y axis and one legend entry per series.
/// Points with non-positive or non-finite y are skipped (the line breaks
/// there). Output depends only on the input, byte for byte. Throws
/// ConfigurationError when there is nothing to draw.
std::string render_svg(const std::vector<SvgSeries>& series, const SvgOptions& opts = {});

}  // namespace mcbound
