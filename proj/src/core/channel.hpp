#pragma once

#include <Eigen/Dense>

namespace becmirror {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

// Quadrature ordering everywhere: (x_2, p_2, x_m, p_m), dimensionless,
// vacuum variance 1 per quadrature ([x, p] = 2i convention).

/// Rotation generator of the beamsplitter equations of motion; M * M = -I.
Mat4 bs_generator();

/// Symplectic form, block-diagonal [[0,1],[-1,0]] per mode.
Mat4 symplectic_form();

/// First and second moments of a two-mode Gaussian state.
struct QuadratureState {
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Identity();

  /// Enforces symmetry to 1e-12 and positive semidefiniteness to -1e-10.
  void validate() const;
};

/// S = cos(omega_st t) I + sin(omega_st t) M. Exact; no integration.
Mat4 propagator(double omega_st, double t);

/// Accumulated noise covariance
///   N(t) = d_eff * integral_0^t S(s) v v^T S(s)^T ds,
/// v = (0, -xi_2, 0, xi_m), in closed form (integrals of cos^2, sin^2,
/// sin cos). Symmetric PSD, rank <= 2.
Mat4 noise_covariance(double omega_st, double xi_2, double xi_m, double d_eff,
                      double t);

struct GaussianChannel {
  Mat4 S = Mat4::Identity();
  Mat4 N = Mat4::Zero();
  double duration = 0.0;

  static GaussianChannel make(double omega_st, double xi_2, double xi_m,
                              double d_eff, double t);
  /// Symplectic to 1e-10, N symmetric PSD.
  void validate() const;
};

/// mean' = S mean, cov' = S cov S^T + N. Rejects non-PSD input covariance.
QuadratureState apply_channel_moments(const QuadratureState& state,
                                      const GaussianChannel& ch);

}  // namespace becmirror
