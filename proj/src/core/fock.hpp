#pragma once

#include <Eigen/Dense>
#include <complex>

#include "core/channel.hpp"
#include "core/wigner.hpp"

namespace becmirror {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Truncated number-basis density matrix for one or two modes.
/// Two-mode index: |n_m, n_2> -> n_m * dim + n_2 (mirror index major).
struct FockDensityMatrix {
  int n_modes = 1;
  int dim = 0;      // truncation per mode
  MatrixXcd rho;

  /// Hermitian to 1e-12, trace 1 +- 1e-10, eigenvalues >= -1e-10.
  void validate() const;
  static FockDensityMatrix from_pure(const VectorXcd& psi, int n_modes, int dim);
};

/// Even cat state amplitudes, alpha real; odd components exactly zero.
/// Requires dim >= alpha^2 + 7 alpha + 10 (truncation tail below 1e-10).
VectorXcd cat_state_fock(double alpha, int dim);

VectorXcd coherent_state_fock(std::complex<double> alpha, int dim);

/// |psi_m> tensor |psi_2> in the two-mode index convention above.
VectorXcd tensor_product(const VectorXcd& psi_m, const VectorXcd& psi_2);

/// rho' = U rho U^dagger with U = exp(-i theta (c_m^dag c_2 + c_2^dag c_m)),
/// built by dense scaling-and-squaring matrix exponential of the full
/// (dim^2)^2 generator; deliberately ignorant of the closed-form channel it
/// is used to check. Heisenberg mode map: x_2 -> cos(theta) x_2 + sin(theta) p_m,
/// so state moments transform with the opposite rotation sense to
/// propagator(+theta). Throws SizeError above dim_cap.
FockDensityMatrix evolve_beamsplitter(const FockDensityMatrix& rho, double theta,
                                      int dim_cap = 40);

/// The evolution unitary itself (for reuse across several input states).
MatrixXcd beamsplitter_unitary(int dim, double theta, int dim_cap = 40);
FockDensityMatrix conjugate(const FockDensityMatrix& rho, const MatrixXcd& u);

FockDensityMatrix partial_trace(const FockDensityMatrix& rho, int keep_mode);

/// Mode occupation <n_mode> of a two-mode (or one-mode) state.
double mean_occupation(const FockDensityMatrix& rho, int mode);

/// Quadrature mean and symmetrized covariance of a two-mode state,
/// ordered (x_2, p_2, x_m, p_m) to match the channel convention.
QuadratureState quadrature_moments(const FockDensityMatrix& rho);

/// Wigner reconstruction of a one-mode state on a grid, displaced-parity
/// (Laguerre) kernel in the x = c + c^dag convention. Sets a warning flag
/// on the output when the grid extent is below 2 sqrt(dim).
WignerGrid wigner_from_fock(const FockDensityMatrix& rho, const GridSpec& g,
                            bool* truncation_warning = nullptr);

}  // namespace becmirror
