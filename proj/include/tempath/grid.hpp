#pragma once

#include <cmath>
#include <stdexcept>

namespace tempath {

// Uniform 1D grid on [min, max], n points inclusive of both ends.
struct Grid1D {
  double min = 0.0;
  double max = 0.0;
  int n = 0;

  double h() const { return (max - min) / (n - 1); }
  double point(int i) const { return min + i * h(); }
  // Trapezoid weight times h.
  double weight(int i) const { return (i == 0 || i == n - 1) ? 0.5 * h() : h(); }

  void validate() const {
    if (n < 2 || !(max > min)) throw std::domain_error("Grid1D: bad window");
  }
};

}  // namespace tempath
