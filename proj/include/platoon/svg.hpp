#ifndef PLATOON_SVG_HPP
#define PLATOON_SVG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "platoon/errors.hpp"

namespace platoon::io {

/// One curve on a line plot.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<std::string> provenance;  // embedded as an XML comment
};

/// Standalone SVG with axes, ticks and a legend. Throws MalformedLog when the
/// plot has no points; nothing is written in that case.
void write_svg(const std::filesystem::path& path, const LinePlot& plot);

}  // namespace platoon::io

#endif
