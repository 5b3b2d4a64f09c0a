#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/full_model.hpp"
#include "core/params.hpp"
#include "test_helpers.hpp"

using namespace becmirror;
using bmtest::reference_params;

TEST_CASE("recoil frequency at reference inputs") {
  const DerivedParams d = derive(reference_params());
  // 2 hbar k^2 / m_a for the 794.98 nm drive on 87Rb
  CHECK(d.omega_2 == doctest::Approx(9.1290790402e4).epsilon(1e-9));
  const double f = d.omega_2 / (2.0 * k_pi);
  CHECK(f > 14.4e3);
  CHECK(f < 14.6e3);
}

TEST_CASE("noise strength at reference inputs is 900 / kappa") {
  const PhysicalParams p = reference_params();
  const DerivedParams d = derive(p);
  // 4 k (3.9 k)^2 / ((0.01 + 0.25) k^2)^2 = 900 / k
  CHECK(d.d_chi == doctest::Approx(900.0 / p.kappa).epsilon(1e-12));
}

TEST_CASE("zero-point widths") {
  const PhysicalParams p = reference_params();
  const DerivedParams d = derive(p);
  CHECK(d.x_zp ==
        doctest::Approx(std::sqrt(1.054571817e-34 / (2 * p.mirror_mass * p.mirror_omega)))
            .epsilon(1e-14));
  CHECK(d.x_zp_wide == doctest::Approx(d.x_zp * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("switched-off coupling") {
  PhysicalParams p = reference_params();
  p.coupling_g = 0.0;
  const DerivedParams d = derive(p);
  CHECK(d.xi_2 == 0.0);
  CHECK(d.omega_st == 0.0);
  CHECK(d.omega_2_shifted == d.omega_2);
  CHECK(std::isinf(d.t_transfer));
}

TEST_CASE("zero detuning removes all shifts") {
  PhysicalParams p = reference_params();
  p.detuning_c = 0.0;
  p.coupling_g = 1e7;
  const DerivedParams d = derive(p);
  CHECK(d.omega_st == 0.0);
  CHECK(d.omega_m_shifted == p.mirror_omega);
  CHECK(d.omega_2_shifted == d.omega_2);
}

TEST_CASE("derive is deterministic bit for bit") {
  PhysicalParams p = reference_params();
  p.coupling_g = 3.8e7;
  const DerivedParams a = derive(p);
  const DerivedParams b = derive(p);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("sign rules") {
  PhysicalParams p = reference_params();
  p.coupling_g = 2e7;
  SUBCASE("xi_2 carries the sign of delta_a") {
    const DerivedParams d = derive(p);
    CHECK(d.xi_2 < 0.0);
    p.detuning_a = -p.detuning_a;
    CHECK(derive(p).xi_2 > 0.0);
  }
  SUBCASE("omega_st sign is sign(delta_tilde) * sign(xi_2)") {
    for (double dc : {0.1, -0.1}) {
      for (double da_sign : {1.0, -1.0}) {
        p.detuning_c = dc * p.kappa;
        p.detuning_a = da_sign * std::abs(p.detuning_a);
        const DerivedParams d = derive(p);
        const double expected = (dc > 0 ? 1.0 : -1.0) * (d.xi_2 > 0 ? 1.0 : -1.0);
        CHECK(d.omega_st * expected > 0.0);
        CHECK(d.xi_m >= 0.0);
      }
    }
  }
}

TEST_CASE("pump scaling by powers of two is exact") {
  PhysicalParams p = reference_params();
  p.coupling_g = 3.8e7;
  const DerivedParams d1 = derive(p);
  for (double s : {0.5, 2.0}) {
    PhysicalParams q = p;
    q.pump_rate = s * p.pump_rate;
    const DerivedParams d2 = derive(q);
    const double s2 = s * s;
    CHECK(d2.n_cav == s2 * d1.n_cav);
    CHECK(d2.d_chi == s2 * d1.d_chi);
    CHECK(d2.omega_st == s2 * d1.omega_st);
    CHECK(p.mirror_omega - d2.omega_m_shifted ==
          s2 * (p.mirror_omega - d1.omega_m_shifted));
  }
}

TEST_CASE("input validation") {
  PhysicalParams p = reference_params();
  p.detuning_a = 0.0;
  CHECK_THROWS_AS(derive(p), InvalidArgument);
  p = reference_params();
  p.mirror_mass = -1.0;
  CHECK_THROWS_AS(derive(p), InvalidArgument);
  p = reference_params();
  p.atom_number = 0.5;
  CHECK_THROWS_AS(derive(p), InvalidArgument);
}

TEST_CASE("steady state: undriven cavity") {
  PhysicalParams p = reference_params();
  p.pump_rate = 0.0;
  const SteadyState s = steady_state(p);
  CHECK(s.a == std::complex<double>(0.0, 0.0));
  CHECK(s.n_cav == 0.0);
  CHECK(s.phi == 0.0);
  CHECK(s.mean_x_m == 0.0);
  CHECK(s.mean_x_2 == 0.0);
}

TEST_CASE("steady state without back-action equals the closed form") {
  PhysicalParams p = reference_params();
  p.coupling_g = 3.8e7;
  SteadyStateOptions opts;
  opts.disable_backaction = true;
  const SteadyState s = steady_state(p, opts);
  const DerivedParams d = derive(p);
  const double closed =
      p.pump_rate * p.pump_rate /
      (d.delta_tilde * d.delta_tilde + p.kappa * p.kappa / 4.0);
  CHECK(s.n_cav == doctest::Approx(closed).epsilon(1e-14));
  CHECK(s.phi == 0.0);
}

TEST_CASE("steady state at reference inputs (matched coupling)") {
  PhysicalParams p = reference_params();
  p.coupling_g = 3.8e7;
  p = match_frequencies(p, FreeParameter::CouplingG, 2 * k_pi * 1e3, 2 * k_pi * 1e7);
  const SteadyState s = steady_state(p);
  CHECK(s.residual < 1e-12 * p.kappa);
  // regression value of the converged phase shift
  CHECK(s.phi == doctest::Approx(-1.51494552e7).epsilon(1e-6));
  CHECK_FALSE(s.phase_shift_negligible);

  // cross-check against a damped long-time integration of the full model
  FullModelParams f = FullModelParams::from_physical(p);
  f.velocity_damping = 2e4;
  FullState y0 = FullState::Zero();
  IntegrateOptions io;
  io.t_end = 1.5e-3;
  io.tol = 1e-10;
  io.n_samples = 4;
  const TimeSeries ts = integrate_full_model(f, y0, io);
  const FullState& yf = ts.y.back();
  const double phi_relaxed = -f.xi_m * yf(4) + f.xi_2 * yf(2);
  CHECK(phi_relaxed == doctest::Approx(s.phi).epsilon(1e-5));
  CHECK(yf(0) * yf(0) + yf(1) * yf(1) == doctest::Approx(s.n_cav).epsilon(1e-5));
}

TEST_CASE("match_frequencies") {
  PhysicalParams p = reference_params();
  p.coupling_g = 3.8e7;

  SUBCASE("reference inputs, free parameter g") {
    const PhysicalParams m =
        match_frequencies(p, FreeParameter::CouplingG, 2 * k_pi * 1e3, 2 * k_pi * 1e7);
    const DerivedParams d = derive(m);
    CHECK(std::abs(d.omega_m_shifted - d.omega_2_shifted) <=
          1e-9 * p.mirror_omega);
    CHECK(m.coupling_g == doctest::Approx(3.8003677e7).epsilon(1e-6));
  }

  SUBCASE("already matched input is returned unchanged") {
    const PhysicalParams m =
        match_frequencies(p, FreeParameter::CouplingG, 2 * k_pi * 1e3, 2 * k_pi * 1e7);
    const PhysicalParams again =
        match_frequencies(m, FreeParameter::CouplingG, 2 * k_pi * 1e3, 2 * k_pi * 1e7);
    CHECK(std::memcmp(&m, &again, sizeof m) == 0);
  }

  SUBCASE("same-sign bracket raises a bracketing error with samples") {
    try {
      match_frequencies(p, FreeParameter::CouplingG, 1.0, 10.0);
      FAIL("expected BracketError");
    } catch (const BracketError& e) {
      CHECK(e.sampled_residuals.size() >= 2);
    }
  }

  SUBCASE("degenerate bracket is rejected") {
    CHECK_THROWS_AS(match_frequencies(p, FreeParameter::CouplingG, 5.0, 5.0),
                    InvalidArgument);
  }

  SUBCASE("free parameter omega_m") {
    const PhysicalParams m = match_frequencies(
        p, FreeParameter::MirrorOmega, 0.3 * p.mirror_omega, 3.0 * p.mirror_omega);
    const DerivedParams d = derive(m);
    CHECK(std::abs(d.omega_m_shifted - d.omega_2_shifted) <= 1e-9 * p.mirror_omega);
  }
}
