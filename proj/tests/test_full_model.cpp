#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/full_model.hpp"
#include "test_helpers.hpp"

using namespace becmirror;
using bmtest::reference_params;

namespace {

PhysicalParams matched_reference() {
  PhysicalParams p = reference_params();
  p.coupling_g = 3.8e7;
  return match_frequencies(p, FreeParameter::CouplingG, 2 * k_pi * 1e3,
                           2 * k_pi * 1e7);
}

}  // namespace

TEST_CASE("origin is a fixed point of the undriven model") {
  FullModelParams f = FullModelParams::from_physical(reference_params());
  f.eta = 0.0;
  CHECK(full_model_rhs(f, FullState::Zero()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("steady state solves the flow equations") {
  const PhysicalParams p = matched_reference();
  const FullModelParams f = FullModelParams::from_physical(p);
  const FullState s = steady_full_state(p);
  CHECK(full_model_rhs(f, s).cwiseAbs().maxCoeff() <= 1e-10 * p.kappa);
}

TEST_CASE("decoupled cavity ring-in matches the analytic solution") {
  const PhysicalParams p = reference_params();
  FullModelParams f = FullModelParams::from_physical(p);
  f.xi_2 = 0.0;
  f.xi_m = 0.0;
  const std::complex<double> pole(0.5 * f.kappa, f.delta_tilde);
  const std::complex<double> a_ss = f.eta / pole;

  FullState y0 = FullState::Zero();  // empty cavity, drive on
  IntegrateOptions opts;
  opts.t_end = 12.0 / f.kappa;
  opts.tol = 1e-11;
  opts.n_samples = 24;
  const TimeSeries ts = integrate_full_model(f, y0, opts);
  double worst = 0.0;
  for (size_t k = 0; k < ts.t.size(); ++k) {
    const std::complex<double> expected =
        a_ss * (1.0 - std::exp(-pole * ts.t[k]));
    worst = std::max(worst, std::abs(std::complex<double>(ts.y[k](0), ts.y[k](1)) -
                                     expected) / std::abs(a_ss));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("harmonic oscillator energy drift over 100 periods") {
  FullModelParams f{};
  f.kappa = 1.0;
  f.delta_tilde = 0.0;
  f.eta = 0.0;
  f.omega_2 = 1.0;
  f.omega_m = 1.0;
  FullState y0 = FullState::Zero();
  y0(4) = 1.0;  // displaced mirror
  IntegrateOptions opts;
  opts.t_end = 100.0 * 2.0 * k_pi;
  opts.tol = 1e-12;
  opts.n_samples = 10;
  const TimeSeries ts = integrate_full_model(f, y0, opts);
  const FullState& yf = ts.y.back();
  const double e0 = 1.0;
  const double ef = yf(4) * yf(4) + yf(5) * yf(5);
  CHECK(std::abs(ef - e0) <= 1e-8);
}

TEST_CASE("divergence guard reports the blow-up time") {
  // decoupled cavity so back-action cannot self-limit the amplitude
  FullModelParams f{};
  f.kappa = 2.6e7;
  f.delta_tilde = 2.6e6;
  f.eta = 2e6 * f.kappa;  // fixed point at |a| ~ 3.9e6
  f.omega_2 = 9.1e4;
  f.omega_m = 1.0e5;
  IntegrateOptions opts;
  opts.t_end = 4.0 / f.kappa;
  opts.tol = 1e-9;
  try {
    integrate_full_model(f, FullState::Zero(), opts);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.time > 0.0);
    CHECK(e.time <= opts.t_end);
  }
}

TEST_CASE("tolerance range is enforced") {
  const FullModelParams f = FullModelParams::from_physical(reference_params());
  IntegrateOptions opts;
  opts.t_end = 1e-6;
  opts.tol = 1e-3;
  CHECK_THROWS_AS(integrate_full_model(f, FullState::Zero(), opts),
                  InvalidArgument);
}

TEST_CASE("decoupled spectrum is the union of the free blocks") {
  FullModelParams f = FullModelParams::from_physical(reference_params());
  f.xi_2 = 0.0;
  f.xi_m = 0.0;
  FullState s = FullState::Zero();
  s(0) = 1.3;  // any operating point: blocks stay decoupled
  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(full_model_jacobian(f, s));
  std::vector<std::complex<double>> expected = {
      {-0.5 * f.kappa, f.delta_tilde},  {-0.5 * f.kappa, -f.delta_tilde},
      {0.0, f.omega_m},                 {0.0, -f.omega_m},
      {0.0, f.omega_2},                 {0.0, -f.omega_2}};
  for (const auto& e : expected) {
    double best = 1e300;
    for (int i = 0; i < 6; ++i)
      best = std::min(best, std::abs(es.eigenvalues()(i) - e));
    CHECK(best <= 1e-9 * f.kappa);
  }
}

TEST_CASE("spectrum is closed under conjugation") {
  const PhysicalParams p = matched_reference();
  const Spectrum s = linearized_spectrum(p);
  for (const auto& e : s.eigenvalues) {
    double best = 1e300;
    for (const auto& o : s.eigenvalues) best = std::min(best, std::abs(std::conj(e) - o));
    CHECK(best <= 1e-6 * p.kappa);
  }
}

TEST_CASE("detuning sign sets stability") {
  PhysicalParams p = matched_reference();

  SUBCASE("weak red drive is damped") {
    p.pump_rate = 1.0 * p.kappa;
    const Spectrum s = linearized_spectrum(p);
    CHECK(s.stable);
  }

  SUBCASE("sign-flipped detuning at full drive is unstable and flagged") {
    p.detuning_c = -p.detuning_c;
    const Spectrum s = linearized_spectrum(p);
    CHECK_FALSE(s.stable);
    double max_re = s.eigenvalues[0].real();
    for (const auto& e : s.eigenvalues) max_re = std::max(max_re, e.real());
    CHECK(max_re > 0.0);
  }

  SUBCASE("drive threshold located by bisection") {
    // back-action shifts the operating point toward instability as the pump
    // grows; the crossing is a regression anchor
    auto unstable = [&](double eta_over_kappa) {
      PhysicalParams q = p;
      q.pump_rate = eta_over_kappa * q.kappa;
      return !linearized_spectrum(q).stable;
    };
    REQUIRE_FALSE(unstable(1.0));
    REQUIRE(unstable(3.9));
    double lo = 1.0, hi = 3.9;
    for (int i = 0; i < 40; ++i) {
      const double mid = 0.5 * (lo + hi);
      (unstable(mid) ? hi : lo) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(1.1624).epsilon(2e-3));
  }
}
