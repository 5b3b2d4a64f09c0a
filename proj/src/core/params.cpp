#include "core/params.hpp"

#include <cmath>
#include <limits>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace becmirror {

void PhysicalParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument(std::string(name) + " must be positive and finite");
  };
  positive(mirror_mass, "mirror_mass");
  positive(mirror_omega, "mirror_omega");
  positive(cavity_length, "cavity_length");
  positive(kappa, "kappa");
  positive(wavelength, "wavelength");
  positive(atom_mass, "atom_mass");
  if (!(atom_number >= 1.0))
    throw InvalidArgument("atom_number must be >= 1");
  if (!(pump_rate >= 0.0) || !std::isfinite(pump_rate))
    throw InvalidArgument("pump_rate must be >= 0 and finite");
  if (detuning_a == 0.0)
    throw InvalidArgument(
        "detuning_a must be nonzero (adiabatic elimination of the excited "
        "state requires off-resonant drive)");
  if (!std::isfinite(detuning_a) || !std::isfinite(detuning_c) ||
      !std::isfinite(coupling_g))
    throw InvalidArgument("detunings and coupling_g must be finite");
}

DerivedParams derive(const PhysicalParams& p) {
  p.validate();
  DerivedParams d;
  d.k_laser = 2.0 * k_pi / p.wavelength;
  // detuning << optical frequency, so the laser wavelength fixes omega_c
  d.omega_cavity = 2.0 * k_pi * k_speed_of_light / p.wavelength;
  d.xi = d.omega_cavity / p.cavity_length;
  d.x_zp = std::sqrt(k_hbar / (2.0 * p.mirror_mass * p.mirror_omega));
  d.x_zp_wide = std::sqrt(k_hbar / (p.mirror_mass * p.mirror_omega));
  d.xi_m = d.x_zp * d.xi;
  d.xi_2 = p.coupling_g * p.coupling_g * std::sqrt(2.0 * p.atom_number) /
           (4.0 * p.detuning_a);
  d.omega_2 = 2.0 * k_hbar * d.k_laser * d.k_laser / p.atom_mass;
  d.delta_tilde = p.detuning_is_effective
                      ? p.detuning_c
                      : p.detuning_c + p.coupling_g * p.coupling_g *
                                           p.atom_number / (2.0 * p.detuning_a);

  const double eta2 = p.pump_rate * p.pump_rate;
  const double denom = d.delta_tilde * d.delta_tilde + p.kappa * p.kappa / 4.0;
  if (!(denom > 0.0))
    throw InvalidArgument("delta_tilde^2 + kappa^2/4 must be positive");
  const double denom2 = denom * denom;

  const double c4 = 4.0 * eta2 * d.delta_tilde / denom2;
  d.omega_m_shifted = p.mirror_omega - c4 * d.xi_m * d.xi_m;
  d.omega_2_shifted = d.omega_2 - c4 * d.xi_2 * d.xi_2;
  d.omega_st = c4 * d.xi_2 * d.xi_m;
  d.d_chi = 4.0 * p.kappa * eta2 / denom2;
  d.n_cav = eta2 / denom;
  d.phi_estimate = -(2.0 * d.xi_m * d.xi_m / p.mirror_omega +
                     2.0 * d.xi_2 * d.xi_2 / d.omega_2) *
                   d.n_cav;
  d.t_transfer = d.omega_st != 0.0
                     ? k_pi / (2.0 * std::abs(d.omega_st))
                     : std::numeric_limits<double>::infinity();
  return d;
}

SteadyState steady_state(const PhysicalParams& p,
                         const SteadyStateOptions& opts) {
  const DerivedParams d = derive(p);
  SteadyState s;
  if (p.pump_rate == 0.0) {
    s.phase_shift_negligible = true;
    return s;
  }
  const double eta2 = p.pump_rate * p.pump_rate;
  const double k24 = p.kappa * p.kappa / 4.0;
  const double coeff = opts.disable_backaction
                           ? 0.0
                           : 2.0 * (d.xi_m * d.xi_m / p.mirror_omega +
                                    d.xi_2 * d.xi_2 / d.omega_2);
  const double tol = 1e-12 * p.kappa;

  double phi = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double dt_eff = d.delta_tilde + phi;
    const double n = eta2 / (dt_eff * dt_eff + k24);
    const double target = -coeff * n;
    const double next = (1.0 - opts.damping) * phi + opts.damping * target;
    residual = std::abs(next - phi);
    phi = next;
    if (residual < tol) break;
  }
  if (!(residual < tol))
    throw ConvergenceError("steady_state did not converge (bistable regime?)",
                           phi, residual, it);

  const double dt_eff = d.delta_tilde + phi;
  s.a = p.pump_rate /
        std::complex<double>(p.kappa / 2.0, dt_eff);  // eta / (i dt + k/2)
  s.n_cav = std::norm(s.a);
  s.phi = phi;
  s.mean_x_m = 2.0 * d.xi_m * s.n_cav / p.mirror_omega;
  s.mean_x_2 = -2.0 * d.xi_2 * s.n_cav / d.omega_2;
  s.phase_shift_negligible = std::abs(phi) <= 0.01 * std::abs(d.delta_tilde);
  s.iterations = it + 1;
  s.residual = residual;
  return s;
}

FreeParameter free_parameter_from_string(const std::string& name) {
  if (name == "g" || name == "coupling_g") return FreeParameter::CouplingG;
  if (name == "delta_a" || name == "detuning_a") return FreeParameter::DetuningA;
  if (name == "omega_m" || name == "mirror_omega") return FreeParameter::MirrorOmega;
  throw InvalidArgument("unknown free parameter '" + name +
                        "' (expected g, delta_a or omega_m)");
}

namespace {

PhysicalParams with_value(const PhysicalParams& p, FreeParameter which,
                          double v) {
  PhysicalParams q = p;
  switch (which) {
    case FreeParameter::CouplingG: q.coupling_g = v; break;
    case FreeParameter::DetuningA: q.detuning_a = v; break;
    case FreeParameter::MirrorOmega: q.mirror_omega = v; break;
  }
  return q;
}

double current_value(const PhysicalParams& p, FreeParameter which) {
  switch (which) {
    case FreeParameter::CouplingG: return p.coupling_g;
    case FreeParameter::DetuningA: return p.detuning_a;
    default: return p.mirror_omega;
  }
}

}  // namespace

PhysicalParams match_frequencies(const PhysicalParams& p, FreeParameter which,
                                 double bracket_lo, double bracket_hi,
                                 double* residual_out) {
  if (!(bracket_hi > bracket_lo))
    throw InvalidArgument("match_frequencies: degenerate or reversed bracket");
  auto residual = [&](double v) {
    const DerivedParams d = derive(with_value(p, which, v));
    return d.omega_m_shifted - d.omega_2_shifted;
  };
  const double tol = 1e-9 * p.mirror_omega;

  const double r0 = residual(current_value(p, which));
  if (std::abs(r0) <= tol) {
    if (residual_out) *residual_out = r0;
    return p;
  }

  double lo = bracket_lo, hi = bracket_hi;
  double rlo = residual(lo), rhi = residual(hi);
  if (std::signbit(rlo) == std::signbit(rhi)) {
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i <= 8; ++i) {
      const double v = lo + (hi - lo) * i / 8.0;
      samples.emplace_back(v, residual(v));
    }
    throw BracketError(
        "match_frequencies: residual has the same sign across the bracket",
        std::move(samples));
  }

  double best = lo, rbest = rlo;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double rm = residual(mid);
    if (std::abs(rm) < std::abs(rbest)) { best = mid; rbest = rm; }
    if (std::signbit(rm) == std::signbit(rlo)) { lo = mid; rlo = rm; }
    else { hi = mid; rhi = rm; }
    if (std::abs(rm) <= tol) break;
  }

  // secant polish from the bisection endpoints
  double x0 = lo, f0 = rlo, x1 = hi, f1 = rhi;
  for (int i = 0; i < 8 && f1 != f0; ++i) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!std::isfinite(x2) || x2 < bracket_lo || x2 > bracket_hi) break;
    const double f2 = residual(x2);
    if (std::abs(f2) < std::abs(rbest)) { best = x2; rbest = f2; }
    x0 = x1; f0 = f1; x1 = x2; f1 = f2;
    if (std::abs(f2) <= tol) break;
  }

  if (std::abs(rbest) > tol)
    throw ConvergenceError("match_frequencies: residual did not reach tolerance",
                           best, rbest, 200);
  if (residual_out) *residual_out = rbest;
  return with_value(p, which, best);
}

}  // namespace becmirror
