#pragma once

#include <complex>
#include <string>

namespace becmirror {

/// Raw experimental inputs, SI units throughout.
///
/// The pump phase is fixed to zero (all derived quantities depend on |eta|^2
/// only), so pump_rate is the magnitude of the drive. When
/// detuning_is_effective is true, detuning_c is taken directly as the
/// atom-shifted cavity detuning; otherwise the shift g^2 N_a / (2 Delta_a)
/// is added on top of it.
struct PhysicalParams {
  double mirror_mass = 0.0;      // kg
  double mirror_omega = 0.0;     // rad/s
  double cavity_length = 0.0;    // m
  double kappa = 0.0;            // rad/s, energy decay rate
  double detuning_c = 0.0;       // rad/s, omega_l - omega_c (sign-carrying)
  double pump_rate = 0.0;        // rad/s, |eta|
  double wavelength = 0.0;       // m, driving laser
  double atom_mass = 0.0;        // kg
  double atom_number = 0.0;      // dimensionless, >= 1
  double detuning_a = 0.0;       // rad/s, omega_l - omega_a (sign-carrying)
  double coupling_g = 0.0;       // rad/s, single-atom cavity coupling
  bool detuning_is_effective = true;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Every effective quantity of the reduced two-oscillator model.
/// All values follow from closed-form expressions; no iteration happens here.
struct DerivedParams {
  double k_laser = 0.0;          // rad/m
  double omega_cavity = 0.0;     // rad/s, 2 pi c / lambda
  double xi = 0.0;               // rad/(s m), omega_c / L
  double x_zp = 0.0;             // m, sqrt(hbar / (2 m Omega_m))
  double x_zp_wide = 0.0;        // m, sqrt(hbar / (m Omega_m)) convention
  double xi_m = 0.0;             // rad/s, mirror coupling, >= 0
  double xi_2 = 0.0;             // rad/s, side-mode coupling, sign of Delta_a
  double omega_2 = 0.0;          // rad/s, atomic recoil frequency
  double delta_tilde = 0.0;      // rad/s, shifted cavity detuning
  double n_cav = 0.0;            // photons at zero phase shift
  double phi_estimate = 0.0;     // rad/s, one-shot steady phase-shift estimate
  double omega_m_shifted = 0.0;  // rad/s
  double omega_2_shifted = 0.0;  // rad/s
  double omega_st = 0.0;         // rad/s, state-transfer frequency (signed)
  double d_chi = 0.0;            // raw white-noise strength of the cavity kick
  double t_transfer = 0.0;       // s, pi / (2 |omega_st|); +inf when omega_st = 0
};

/// Closed-form derivation of the reduced model. Pure; identical inputs give
/// bit-identical outputs.
DerivedParams derive(const PhysicalParams& p);

struct SteadyStateOptions {
  int max_iterations = 10000;
  double damping = 0.5;            // fixed-point under-relaxation
  bool disable_backaction = false; // freeze the phase shift at zero
};

struct SteadyState {
  std::complex<double> a;      // intracavity amplitude
  double n_cav = 0.0;          // |a|^2
  double phi = 0.0;            // rad/s, converged phase shift
  double mean_x_m = 0.0;
  double mean_x_2 = 0.0;
  bool phase_shift_negligible = false;  // |phi| <= 0.01 |delta_tilde|
  int iterations = 0;
  double residual = 0.0;       // last |phi_{k+1} - phi_k|
};

/// Damped fixed-point solve of the mean-field photon number and phase shift.
/// Converges when successive phase shifts differ by < 1e-12 kappa.
/// Throws ConvergenceError (carrying the last iterate) in bistable regimes.
SteadyState steady_state(const PhysicalParams& p,
                         const SteadyStateOptions& opts = {});

enum class FreeParameter { CouplingG, DetuningA, MirrorOmega };

FreeParameter free_parameter_from_string(const std::string& name);

/// Adjusts the chosen parameter until the shifted oscillator frequencies
/// agree to 1e-9 Omega_m. Deterministic bisection followed by a secant
/// polish. Returns the input unchanged if it is already matched.
/// Throws BracketError when the residual does not change sign on
/// [bracket_lo, bracket_hi].
PhysicalParams match_frequencies(const PhysicalParams& p, FreeParameter which,
                                 double bracket_lo, double bracket_hi,
                                 double* residual_out = nullptr);

}  // namespace becmirror
