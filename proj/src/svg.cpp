#include "miqubo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace miqubo::svg {

namespace {

constexpr double width = 800.0;
constexpr double height = 480.0;
constexpr double left = 70.0;
constexpr double right = 20.0;
constexpr double top = 40.0;
constexpr double bottom = 120.0;

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string num(double v) {
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

void header(std::ostringstream& o, const std::string& title, const std::string& y_label) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  o << "<text transform=\"translate(16," << num(top + (height - top - bottom) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
}

struct Axis {
  double lo, hi;
  double map_y(double v) const {
    const double span = hi > lo ? hi - lo : 1.0;
    return top + (height - top - bottom) * (1.0 - (v - lo) / span);
  }
};

void y_axis(std::ostringstream& o, const Axis& a) {
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
    << height - bottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = a.lo + (a.hi - a.lo) * t / 4.0;
    const double y = a.map_y(v);
    o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(v)
      << "</text>\n";
  }
}

}  // namespace

std::string bar_chart(const std::vector<std::string>& labels, const std::vector<double>& values,
                      const std::string& title, const std::string& y_label) {
  std::ostringstream o;
  header(o, title, y_label);
  double hi = 0.0;
  for (double v : values)
    if (std::isfinite(v)) hi = std::max(hi, v);
  const Axis axis{0.0, hi > 0.0 ? hi : 1.0};
  y_axis(o, axis);
  const double slot = values.empty() ? 0.0 : (width - left - right) / static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = left + slot * static_cast<double>(i);
    const double y = axis.map_y(std::max(values[i], 0.0));
    o << "<rect x=\"" << num(x + slot * 0.1) << "\" y=\"" << num(y) << "\" width=\"" << num(slot * 0.8)
      << "\" height=\"" << num(height - bottom - y) << "\" fill=\"" << palette[0] << "\"/>\n";
    const double lx = x + slot * 0.5;
    o << "<text transform=\"translate(" << num(lx) << ',' << num(height - bottom + 8)
      << ") rotate(60)\" text-anchor=\"start\">" << escape(i < labels.size() ? labels[i] : "") << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
  std::ostringstream o;
  header(o, title, y_label);
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.mean[i])) continue;
      const double spread = i < s.spread.size() && std::isfinite(s.spread[i]) ? s.spread[i] : 0.0;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.mean[i] - spread);
      y_hi = std::max(y_hi, s.mean[i] + spread);
    }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const Axis axis{y_lo, y_hi};
  y_axis(o, axis);
  const auto map_x = [&](double v) {
    const double span = x_hi > x_lo ? x_hi - x_lo : 1.0;
    return left + (width - left - right) * (v - x_lo) / span;
  };
  o << "<text x=\"" << num(left + (width - left - right) / 2) << "\" y=\"" << num(height - bottom + 40)
    << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  for (double v = std::ceil(x_lo); v <= x_hi; v += 1.0)
    o << "<text x=\"" << num(map_x(v)) << "\" y=\"" << num(height - bottom + 16) << "\" text-anchor=\"middle\">"
      << num(v) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& sr = series[s];
    const char* color = palette[s % std::size(palette)];
    std::string band_top, band_bottom, line;
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      if (!std::isfinite(sr.mean[i])) continue;
      const double spread = i < sr.spread.size() && std::isfinite(sr.spread[i]) ? sr.spread[i] : 0.0;
      const std::string px = num(map_x(sr.x[i]));
      band_top += px + "," + num(axis.map_y(sr.mean[i] + spread)) + " ";
      band_bottom.insert(0, px + "," + num(axis.map_y(sr.mean[i] - spread)) + " ");
      line += px + "," + num(axis.map_y(sr.mean[i])) + " ";
    }
    o << "<polygon points=\"" << band_top << band_bottom << "\" fill=\"" << color
      << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    o << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(width - right - 90) << "\" y=\"" << num(top + 14 * static_cast<double>(s + 1))
      << "\" fill=\"" << color << "\">" << escape(sr.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace miqubo::svg
