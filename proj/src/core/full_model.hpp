#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "core/params.hpp"

namespace becmirror {

/// State ordering: (Re a, Im a, x_2, p_2, x_m, p_m), dimensionless.
using FullState = Eigen::Matrix<double, 6, 1>;

/// Coefficients of the pre-elimination mean-field model. Tests may zero the
/// couplings directly; velocity_damping adds an artificial -gamma p term so
/// undamped oscillators can be relaxed to the fixed point numerically.
struct FullModelParams {
  double kappa = 0.0;
  double delta_tilde = 0.0;
  double eta = 0.0;
  double omega_2 = 0.0;
  double omega_m = 0.0;
  double xi_2 = 0.0;
  double xi_m = 0.0;
  double velocity_damping = 0.0;

  static FullModelParams from_physical(const PhysicalParams& p);
};

/// Mean-field closure <a^dag a> -> |<a>|^2 of the three-mode equations.
FullState full_model_rhs(const FullModelParams& p, const FullState& s);

struct IntegrateOptions {
  double t_end = 0.0;
  double tol = 1e-9;          // relative and absolute, in [1e-12, 1e-4]
  long long n_samples = 512;  // uniformly spaced output rows (incl. t = 0)
  double divergence_guard = 1e6;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<FullState> y;
};

/// Adaptive Dormand-Prince 5(4) with step rejection; lands exactly on the
/// requested sample times. Throws DivergenceError when |a| exceeds the guard.
TimeSeries integrate_full_model(const FullModelParams& p, const FullState& s0,
                                const IntegrateOptions& opts);

/// Jacobian of the mean-field flow at the given state.
Eigen::Matrix<double, 6, 6> full_model_jacobian(const FullModelParams& p,
                                                const FullState& s);

struct Spectrum {
  std::array<std::complex<double>, 6> eigenvalues;  // sorted by imaginary part
  bool stable = false;  // all real parts <= 1e-9 kappa
};

/// Eigenvalues of the Jacobian at the self-consistent steady state.
Spectrum linearized_spectrum(const PhysicalParams& p,
                             const SteadyStateOptions& opts = {});

/// Steady state embedded as a FullState (for integration experiments).
FullState steady_full_state(const PhysicalParams& p,
                            const SteadyStateOptions& opts = {});

}  // namespace becmirror
