#include "platoon/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace platoon::io {

namespace {

constexpr double kWidth = 880.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 180.0, kTop = 40.0, kBottom = 50.0;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void absorb(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo == hi) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

double tick_step(const Range& r) {
  const double span = r.hi - r.lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= mult * mag) {
      return mult * mag;
    }
  }
  return 10.0 * mag;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg(const std::filesystem::path& path, const LinePlot& plot) {
  Range xr, yr;
  std::size_t points = 0;
  for (const Series& s : plot.series) {
    if (s.x.size() != s.y.size()) {
      throw DimensionMismatch("svg: series '" + s.label + "' has mismatched x/y");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.absorb(s.x[i]);
      yr.absorb(s.y[i]);
      ++points;
    }
  }
  if (points == 0) {
    throw MalformedLog("svg: nothing to plot for " + path.string());
  }
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  for (const std::string& line : plot.provenance) {
    svg << "<!-- " << escape(line) << " -->\n";
  }
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">"
      << escape(plot.title) << "</text>\n";

  // axes and ticks
  svg << "<g stroke=\"#333\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw
      << "\" y2=\"" << kTop + ph << "\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + ph << "\"/>\n";
  const double xs = tick_step(xr);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9; t += xs) {
    svg << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(t) << "\" y2=\""
        << kTop + ph + 4 << "\"/>\n";
    svg << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">" << fmt(t) << "</text>\n";
  }
  const double ys = tick_step(yr);
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9; t += ys) {
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft << "\" y2=\""
        << py(t) << "\"/>\n";
    svg << "<text x=\"" << kLeft - 7 << "\" y=\"" << py(t) + 4
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333\">" << fmt(t) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
      << escape(plot.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + ph / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 "
      << kTop + ph / 2 << ")\">" << escape(plot.y_label) << "</text>\n";

  // curves
  for (const Series& s : plot.series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) {
      svg << " stroke-dasharray=\"6 4\"";
    }
    svg << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    svg << "\"/>\n";
  }

  // legend
  double ly = kTop + 10;
  for (const Series& s : plot.series) {
    const double lx = kLeft + pw + 14;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 26 << "\" y2=\"" << ly
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) {
      svg << " stroke-dasharray=\"6 4\"";
    }
    svg << "/>\n";
    svg << "<text x=\"" << lx + 32 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << escape(s.label) << "</text>\n";
    ly += 18;
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) {
    throw IoError("svg: cannot write " + path.string());
  }
  out << svg.str();
}

}  // namespace platoon::io
