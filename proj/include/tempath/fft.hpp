#pragma once

#include <complex>
#include <vector>

namespace tempath {

// Complex-to-complex FFT (FFTW backed, power-of-two sizes in this project).
// sign = -1 forward (e^{-i 2 pi l j / n}), +1 backward, unnormalized.
void fft(std::vector<std::complex<double>>& data, int sign);

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace tempath
