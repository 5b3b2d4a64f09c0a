#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace becmirror {

/// Rectangular phase-space grid. Quadrature convention x = c + c^dagger,
/// vacuum variance 1, normalization  integral W dx dp = 1.
struct GridSpec {
  double x_min = -8.0, x_max = 8.0;
  int n_x = 256;
  double p_min = -8.0, p_max = 8.0;
  int n_p = 256;

  double dx() const { return (x_max - x_min) / (n_x - 1); }
  double dp() const { return (p_max - p_min) / (n_p - 1); }
  double x(int i) const { return x_min + i * dx(); }
  double p(int j) const { return p_min + j * dp(); }
  void validate() const;
  bool operator==(const GridSpec& o) const;
  /// Square grid, centred on the origin, with identical x and p axes;
  /// required for exact quarter-turn index rotations.
  bool symmetric_square() const;
};

struct WignerGrid {
  GridSpec spec;
  std::vector<double> w;  // w[i * n_p + j], x-major
  bool fringe_warning = false;   // grid too coarse for cat fringes
  double renorm_drift = 0.0;     // mass drift absorbed by renormalization

  double& at(int i, int j) { return w[(size_t)i * spec.n_p + j]; }
  double at(int i, int j) const { return w[(size_t)i * spec.n_p + j]; }

  /// Trapezoidal integral of W over the grid.
  double integral() const;
  double min_value() const;
};

WignerGrid wigner_vacuum(const GridSpec& g);
WignerGrid wigner_coherent(double alpha, const GridSpec& g);   // alpha real
WignerGrid wigner_thermal(double nbar, const GridSpec& g);

/// Even cat (|alpha> + |-alpha>)/sqrt(N), alpha real. Lobes at x = +-2 alpha,
/// interference fringes in p. Sets fringe_warning when the grid spacing
/// exceeds pi / (4 alpha).
WignerGrid wigner_cat(double alpha, const GridSpec& g);

struct OverlapResult {
  double trace_overlap = 0.0;       // 4 pi integral W1 W2 = Tr rho1 rho2
  double normalized_overlap = 0.0;  // cosine overlap of the two surfaces
};

/// Requires bit-identical grids; never resamples.
///
/// Prefactor: with W normalized over dx dp and alpha = (x + ip)/2,
/// Tr rho1 rho2 = pi * integral W1s W2s d^2alpha with W_s = 4 W, giving
/// 4 pi * integral W1 W2 dx dp.
OverlapResult overlap_fidelity(const WignerGrid& a, const WignerGrid& b);

struct Marginals {
  std::vector<double> x;   // values of P(x), length n_x
  std::vector<double> p;   // values of P(p), length n_p
};

Marginals marginals(const WignerGrid& g);

/// Gaussian channel action on a single-mode grid: rotate the distribution by
/// theta about the origin, then convolve with the Gaussian of covariance
/// n22 (2x2 PSD, ordered (x, p)). Quarter turns are exact index
/// permutations; other angles use an FFT shear rotation. Convolution is FFT
/// based with zero padding, direct summation below 64x64. The output is
/// renormalized to the input mass; the absorbed drift is recorded.
WignerGrid apply_channel_wigner(const WignerGrid& in, double theta,
                                const Eigen::Matrix2d& n22);

}  // namespace becmirror
