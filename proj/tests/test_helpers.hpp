#pragma once

#include "core/params.hpp"

namespace bmtest {

// 6 ng mirror, 195 um cavity, 87Rb side mode; coupling g left to the caller.
inline becmirror::PhysicalParams reference_params() {
  becmirror::PhysicalParams p;
  p.mirror_mass = 6e-12;
  p.mirror_omega = 2.0 * 3.14159265358979323846 * 16e3;
  p.cavity_length = 195e-6;
  p.kappa = 2.6e7;
  p.detuning_c = 0.1 * p.kappa;
  p.pump_rate = 3.9 * p.kappa;
  p.wavelength = 794.98e-9;
  p.atom_mass = 1.4432e-25;
  p.atom_number = 25000.0;
  p.detuning_a = -2.0 * 3.14159265358979323846 * 127e9;
  p.coupling_g = 0.0;
  p.detuning_is_effective = true;
  return p;
}

// Equal bare frequencies (mirror tuned to the recoil frequency), weak pump
// shifts, couplings sized for |omega_st| ~ 150 rad/s at delta_tilde = 4 kappa.
// kappa / |omega_st| ~ 1.7e5, so the cavity is deeply adiabatic.
inline becmirror::PhysicalParams weak_coupling_params() {
  becmirror::PhysicalParams p = reference_params();
  p.detuning_c = 4.0 * p.kappa;
  const becmirror::DerivedParams d0 = becmirror::derive(p);
  p.mirror_omega = d0.omega_2;
  // mirror mass chosen so xi_m ~ 6.5e4 rad/s
  const double x_zp_needed = 6.5e4 / d0.xi;
  p.mirror_mass = 1.054571817e-34 / (2.0 * p.mirror_omega * x_zp_needed * x_zp_needed);
  p.coupling_g = 3.05e7;
  return p;
}

}  // namespace bmtest
