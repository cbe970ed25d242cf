#include "tempath/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace tempath {

namespace {
// One cached plan pair per size; FFTW_ESTIMATE keeps planning deterministic.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* buf = nullptr;
  std::size_t n = 0;
};

std::mutex plan_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
  static std::map<std::size_t, PlanPair> cache;
  return cache;
}

PlanPair& plan_for(std::size_t n) {
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanPair p;
  p.n = n;
  p.buf = fftw_alloc_complex(n);
  if (!p.buf) throw std::bad_alloc();
  p.fwd = fftw_plan_dft_1d(static_cast<int>(n), p.buf, p.buf, FFTW_FORWARD,
                           FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_1d(static_cast<int>(n), p.buf, p.buf, FFTW_BACKWARD,
                           FFTW_ESTIMATE);
  return cache.emplace(n, p).first->second;
}
}  // namespace

void fft(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) return;
  std::lock_guard<std::mutex> lock(plan_mutex);
  PlanPair& p = plan_for(data.size());
  auto* buf = reinterpret_cast<std::complex<double>*>(p.buf);
  std::copy(data.begin(), data.end(), buf);
  fftw_execute(sign < 0 ? p.fwd : p.bwd);
  std::copy(buf, buf + data.size(), data.begin());
}

}  // namespace tempath
