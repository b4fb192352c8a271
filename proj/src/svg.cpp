#include "mcbound/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mcbound/errors.hpp"

namespace mcbound {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<SvgSeries>& series, const SvgOptions& opts) {
  double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
  auto usable_x = [&](double x) { return std::isfinite(x) && (!opts.log_x || x > 0.0); };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable_x(s.x[i]) || !(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (series.empty() || !(xmin <= xmax)) {
    throw ConfigurationError("render: at least one curve", "no drawable points in the input curves");
  }
  // Whole decades on the y axis; a flat curve still gets one decade of room.
  double ly0 = std::floor(std::log10(ymin));
  double ly1 = std::ceil(std::log10(ymax));
  if (ly1 <= ly0) ly1 = ly0 + 1.0;
  double lx0 = opts.log_x ? std::log10(xmin) : xmin;
  double lx1 = opts.log_x ? std::log10(xmax) : xmax;
  if (lx1 <= lx0) lx1 = lx0 + 1.0;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = opts.width - left - right;
  const double ph = opts.height - top - bottom;
  auto px = [&](double x) { return left + pw * ((opts.log_x ? std::log10(x) : x) - lx0) / (lx1 - lx0); };
  auto py = [&](double y) { return top + ph * (1.0 - (std::log10(y) - ly0) / (ly1 - ly0)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
     << opts.height << "\" viewBox=\"0 0 " << opts.width << " " << opts.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << escape(opts.title) << "</text>\n";
  }
  os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double d = ly0; d <= ly1 + 1e-9; d += 1.0) {
    const double y = py(std::pow(10.0, d));
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + pw)
       << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(std::pow(10.0, d)) << "</text>\n";
  }
  if (opts.log_x) {
    for (double d = std::ceil(lx0); d <= lx1 + 1e-9; d += 1.0) {
      const double x = px(std::pow(10.0, d));
      os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(x)
         << "\" y2=\"" << fmt(top + ph) << "\" stroke=\"#dddddd\"/>\n";
      os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(top + ph + 16)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
         << tick_label(std::pow(10.0, d)) << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double v = lx0 + (lx1 - lx0) * i / 4.0;
      os << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(top + ph + 16)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
         << tick_label(v) << "</text>\n";
    }
  }
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << opts.height - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << escape(opts.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" transform=\"rotate(-90 16 "
     << fmt(top + ph / 2) << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"12\">" << escape(opts.y_label) << "</text>\n";

  if (opts.marker_x && usable_x(*opts.marker_x)) {
    const double x = px(*opts.marker_x);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(x)
       << "\" y2=\"" << fmt(top + ph) << "\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    std::ostringstream pts;
    auto flush = [&] {
      const std::string p = pts.str();
      if (!p.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
           << p << "\"/>\n";
      }
      pts.str("");
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable_x(s.x[i]) || !(s.y[i] > 0.0) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!pts.str().empty()) pts << ' ';
      pts << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
    }
    flush();
    const double ly = top + 14 + 16 * static_cast<double>(k);
    os << "<line x1=\"" << fmt(left + pw - 150) << "\" y1=\"" << fmt(ly) << "\" x2=\""
       << fmt(left + pw - 128) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(left + pw - 122) << "\" y=\"" << fmt(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace mcbound
