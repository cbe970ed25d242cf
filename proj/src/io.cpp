#include "tempath/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace tempath {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fnv1a64: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
constexpr int kW = 720, kH = 480;
constexpr int kL = 70, kR = 160, kT = 40, kB = 50;

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}
}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::vector<SvgSeries>& series) {
  double x_lo = 0, x_hi = 1, y_hi = 1;
  bool first = true;
  for (const auto& s : series) {
    if (!s.curve || s.curve->coordinate.empty()) continue;
    const double lo = s.curve->coordinate.front();
    const double hi = s.curve->coordinate.back();
    const double ymax = *std::max_element(s.curve->density.begin(), s.curve->density.end());
    if (first) {
      x_lo = lo;
      x_hi = hi;
      y_hi = ymax;
      first = false;
    } else {
      x_lo = std::min(x_lo, lo);
      x_hi = std::max(x_hi, hi);
      y_hi = std::max(y_hi, ymax);
    }
  }
  if (first || !(x_hi > x_lo)) {
    x_lo = 0;
    x_hi = 1;
  }
  if (!(y_hi > 0)) y_hi = 1;
  y_hi *= 1.08;

  auto px = [&](double x) {
    return kL + (x - x_lo) / (x_hi - x_lo) * (kW - kL - kR);
  };
  auto py = [&](double y) { return kH - kB - y / y_hi * (kH - kT - kB); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_svg_plot: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes
  out << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR
      << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\""
      << kH - kB << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 5.0;
    const double yv = y_hi * i / 5.0;
    out << "<line x1=\"" << px(xv) << "\" y1=\"" << kH - kB << "\" x2=\"" << px(xv)
        << "\" y2=\"" << kH - kB + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(xv) << "</text>\n";
    out << "<line x1=\"" << kL - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kL
        << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kL - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << "</text>\n";

  int legend_row = 0;
  for (const auto& s : series) {
    if (!s.curve || s.curve->coordinate.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.curve->coordinate.size(); ++i)
      out << px(s.curve->coordinate[i]) << "," << py(s.curve->density[i]) << " ";
    out << "\"/>\n";
    const int ly = kT + 14 + 18 * legend_row++;
    out << "<line x1=\"" << kW - kR + 10 << "\" y1=\"" << ly << "\" x2=\""
        << kW - kR + 34 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kW - kR + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace tempath
