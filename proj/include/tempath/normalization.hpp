#pragma once

#include <Eigen/Dense>
#include <functional>

#include "tempath/grid.hpp"
#include "tempath/kernels.hpp"
#include "tempath/types.hpp"

namespace tempath {

// Test-function normalization: scale a kernel so the total outgoing
// probability for a given prepared packet is one,
//   N_phi = integral dt'' dx'' | integral dt' dx' K phi |^2 ,
// done per packet. All kernels in this project factor into a time piece
// and a space piece, so the nested quadrature splits per axis.
//
// With this project's phase conventions the closed-form free kernel is
// already unitary and N_phi = 1; the unnormalized semiclassical kernel
// sqrt(-D) exp(iS) gives N = (2 pi)^2 in 1+1 dimensions (the analogue of
// the paper's (2 pi)^4 in 3+1).

using AxisKernelFn = std::function<Amplitude(double from, double to)>;

struct SeparableKernel4D {
  AxisKernelFn time;   // K^(t)(t', t'')
  AxisKernelFn space;  // K^(x)(x', x'')
  Amplitude scale{1.0, 0.0};
};

SeparableKernel4D free_kernel_separable(double m, double T1, double T2);

struct NormalizationGrid {
  Grid1D t;
  Grid1D x;
};

// Window covering +-sigmas of both the packet and its evolved image.
NormalizationGrid default_normalization_grid(const GaussianPacket4D& packet,
                                             double m, double T1, double T2,
                                             int n = 2048, double sigmas = 10.0);

struct NormalizationResult {
  double n_phi = 0.0;
  Amplitude normalized_scale{0.0, 0.0};  // 1/sqrt(N_phi), real positive
  double residual = 0.0;                 // |norm - 1| after scaling
};

NormalizationResult normalization_constant(const SeparableKernel4D& kernel,
                                           const GaussianPacket4D& packet, double T1,
                                           double T2, const NormalizationGrid& grid);

// Product-form sampled wave function, norm = |scale|^2 * |f_t|^2 * |f_x|^2.
struct SampledWave4D {
  Grid1D t;
  Grid1D x;
  Eigen::VectorXcd f_t;
  Eigen::VectorXcd f_x;
  Amplitude scale{1.0, 0.0};

  double norm_sq() const;
  Amplitude value(int i, int j) const { return scale * f_t(i) * f_x(j); }
};

// Apply the kernel to the packet on the grid and rescale to unit norm.
SampledWave4D normalized_evolve(const SeparableKernel4D& kernel,
                                const GaussianPacket4D& packet, double T1, double T2,
                                const NormalizationGrid& grid);

// Relative L2 distance between two product-form waves on equal grids.
double rel_l2_error(const SampledWave4D& a, const SampledWave4D& b);

}  // namespace tempath
