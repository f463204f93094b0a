#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace decmdp::io {

/// One curve of a line plot: column `y` against column `x` of a CSV file.
struct PlotSeries {
  std::filesystem::path csv;
  std::string x;
  std::string y;
  std::string label;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// Moving-average window applied to every series (1: raw).
  std::size_t smooth = 1;
};

/// Renders the plot as SVG, reading every series from its CSV.
void write_svg_plot(const LinePlot& plot, const std::filesystem::path& out);

/// Heatmap of column `value` from a CSV with `x` and `y` columns laid out on
/// a regular grid. 8-bit RGB PNG, one pixel block per cell, y up.
void write_png_heatmap(const std::filesystem::path& csv, const std::string& value,
                       const std::filesystem::path& out, std::size_t pixels_per_cell = 4);

}  // namespace decmdp::io
