#include "core/full_model.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace becmirror {

FullModelParams FullModelParams::from_physical(const PhysicalParams& p) {
  const DerivedParams d = derive(p);
  FullModelParams f;
  f.kappa = p.kappa;
  f.delta_tilde = d.delta_tilde;
  f.eta = p.pump_rate;
  f.omega_2 = d.omega_2;
  f.omega_m = p.mirror_omega;
  f.xi_2 = d.xi_2;
  f.xi_m = d.xi_m;
  return f;
}

FullState full_model_rhs(const FullModelParams& p, const FullState& s) {
  const double u = s(0), v = s(1);
  const double x2 = s(2), p2 = s(3), xm = s(4), pm = s(5);
  const double phi = -p.xi_m * xm + p.xi_2 * x2;
  const double dt_eff = p.delta_tilde + phi;
  const double n = u * u + v * v;
  FullState d;
  d(0) = -0.5 * p.kappa * u + dt_eff * v + p.eta;
  d(1) = -dt_eff * u - 0.5 * p.kappa * v;
  d(2) = p.omega_2 * p2;
  d(3) = -p.omega_2 * x2 - 2.0 * p.xi_2 * n - p.velocity_damping * p2;
  d(4) = p.omega_m * pm;
  d(5) = -p.omega_m * xm + 2.0 * p.xi_m * n - p.velocity_damping * pm;
  return d;
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

TimeSeries integrate_full_model(const FullModelParams& p, const FullState& s0,
                                const IntegrateOptions& opts) {
  if (!(opts.tol >= 1e-12 && opts.tol <= 1e-4))
    throw InvalidArgument("integrate: tol must lie in [1e-12, 1e-4]");
  if (!(opts.t_end >= 0.0)) throw InvalidArgument("integrate: t_end must be >= 0");
  if (opts.n_samples < 1) throw InvalidArgument("integrate: n_samples must be >= 1");

  TimeSeries out;
  out.t.reserve(opts.n_samples + 1);
  out.y.reserve(opts.n_samples + 1);
  out.t.push_back(0.0);
  out.y.push_back(s0);
  if (opts.t_end == 0.0) return out;

  const double sample_dt = opts.t_end / (double)opts.n_samples;
  // conservative initial step: resolve the cavity pole
  const double rate = std::max({p.kappa, std::abs(p.delta_tilde),
                                p.omega_m, p.omega_2, 1.0 / opts.t_end});
  double h = 0.1 / rate;

  double t = 0.0;
  FullState y = s0;
  FullState k1 = full_model_rhs(p, y);
  long long next_sample = 1;

  auto check = [&](const FullState& s, double tt) {
    if (!s.allFinite() || std::hypot(s(0), s(1)) > opts.divergence_guard)
      throw DivergenceError("full model diverged", tt);
  };

  while (t < opts.t_end) {
    const double t_target = std::min(opts.t_end, next_sample * sample_dt);
    bool hit = false;
    if (t + h >= t_target - 1e-15 * opts.t_end) {
      h = t_target - t;
      hit = true;
    }

    const FullState k2 = full_model_rhs(p, y + h * (a21 * k1));
    const FullState k3 = full_model_rhs(p, y + h * (a31 * k1 + a32 * k2));
    const FullState k4 = full_model_rhs(p, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const FullState k5 =
        full_model_rhs(p, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const FullState k6 = full_model_rhs(
        p, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const FullState y5 =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const FullState k7 = full_model_rhs(p, y5);
    const FullState err_vec =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double scale =
          opts.tol + opts.tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      err = std::max(err, std::abs(err_vec(i)) / scale);
    }

    if (err <= 1.0) {
      t = hit ? t_target : t + h;
      y = y5;
      k1 = k7;  // FSAL
      check(y, t);
      if (hit && (t >= next_sample * sample_dt - 1e-15 * opts.t_end)) {
        out.t.push_back(t);
        out.y.push_back(y);
        ++next_sample;
      }
    }
    const double factor =
        err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (!(h > 0.0) || t + h == t)
      throw DivergenceError("full model step size underflow", t);
  }
  return out;
}

Eigen::Matrix<double, 6, 6> full_model_jacobian(const FullModelParams& p,
                                                const FullState& s) {
  const double u = s(0), v = s(1);
  const double x2 = s(2), xm = s(4);
  const double phi = -p.xi_m * xm + p.xi_2 * x2;
  const double dt_eff = p.delta_tilde + phi;
  Eigen::Matrix<double, 6, 6> j = Eigen::Matrix<double, 6, 6>::Zero();
  // d(da/dt)/d(...): u row, v row
  j(0, 0) = -0.5 * p.kappa;
  j(0, 1) = dt_eff;
  j(0, 2) = v * p.xi_2;
  j(0, 4) = -v * p.xi_m;
  j(1, 0) = -dt_eff;
  j(1, 1) = -0.5 * p.kappa;
  j(1, 2) = -u * p.xi_2;
  j(1, 4) = u * p.xi_m;
  // oscillators
  j(2, 3) = p.omega_2;
  j(3, 2) = -p.omega_2;
  j(3, 0) = -4.0 * p.xi_2 * u;
  j(3, 1) = -4.0 * p.xi_2 * v;
  j(3, 3) = -p.velocity_damping;
  j(4, 5) = p.omega_m;
  j(5, 4) = -p.omega_m;
  j(5, 0) = 4.0 * p.xi_m * u;
  j(5, 1) = 4.0 * p.xi_m * v;
  j(5, 5) = -p.velocity_damping;
  return j;
}

FullState steady_full_state(const PhysicalParams& p,
                            const SteadyStateOptions& opts) {
  const SteadyState ss = steady_state(p, opts);
  FullState s;
  s << ss.a.real(), ss.a.imag(), ss.mean_x_2, 0.0, ss.mean_x_m, 0.0;
  return s;
}

Spectrum linearized_spectrum(const PhysicalParams& p,
                             const SteadyStateOptions& opts) {
  const FullModelParams f = FullModelParams::from_physical(p);
  const FullState s = steady_full_state(p, opts);
  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(full_model_jacobian(f, s));
  Spectrum spec;
  std::array<std::complex<double>, 6> ev;
  for (int i = 0; i < 6; ++i) ev[i] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  spec.eigenvalues = ev;
  double max_re = ev[0].real();
  for (const auto& e : ev) max_re = std::max(max_re, e.real());
  spec.stable = max_re <= 1e-9 * p.kappa;
  return spec;
}

}  // namespace becmirror
