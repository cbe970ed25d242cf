#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempath/experiment.hpp"

namespace tempath {

// Fixed-precision number formatting; keeps CSV bytes reproducible.
std::string format_double(double v);

std::uint64_t fnv1a64_file(const std::string& path);

struct SvgSeries {
  std::string label;
  const Curve* curve = nullptr;
  std::string color = "#1f77b4";
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::vector<SvgSeries>& series);

}  // namespace tempath
