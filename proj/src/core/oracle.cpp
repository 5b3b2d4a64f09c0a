#include "core/oracle.hpp"

#include <cmath>
#include <random>

#include "core/channel.hpp"
#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/fock.hpp"
#include "core/sde.hpp"
#include "core/wigner.hpp"

namespace becmirror {

namespace {

// Adaptive Simpson quadrature, used as the independent route to N(t).
double adaptive_simpson(auto&& f, double a, double b, double fa, double fm,
                        double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(auto&& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 40);
}

}  // namespace

OracleReport oracle_check(const OracleOptions& opts) {
  OracleReport rep;
  auto add = [&](const std::string& name, double measured, double tol) {
    OracleCheck c;
    c.name = name;
    c.measured = measured;
    c.tolerance = tol * opts.tolerance_scale;
    c.passed = measured <= c.tolerance;
    rep.checks.push_back(c);
  };

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  // 1. symplectic form, group law, noise composition, noise rank
  {
    const Mat4 j = symplectic_form();
    double worst_sym = 0.0, worst_group = 0.0, worst_comp = 0.0, worst_rank = 0.0;
    for (int c = 0; c < 100; ++c) {
      const double w = 3.0 * uni(rng);
      const double t1 = 2.0 * std::abs(uni(rng));
      const double t2 = 2.0 * std::abs(uni(rng));
      const double xi2 = uni(rng), xim = uni(rng);
      const double d = std::abs(uni(rng));
      const Mat4 s1 = propagator(w, t1), s2 = propagator(w, t2);
      worst_sym = std::max(worst_sym,
                           (s1 * j * s1.transpose() - j).cwiseAbs().maxCoeff());
      worst_group = std::max(
          worst_group, (s2 * s1 - propagator(w, t1 + t2)).cwiseAbs().maxCoeff());
      const Mat4 n1 = noise_covariance(w, xi2, xim, d, t1);
      const Mat4 n2 = noise_covariance(w, xi2, xim, d, t2);
      const Mat4 n12 = noise_covariance(w, xi2, xim, d, t1 + t2);
      worst_comp = std::max(
          worst_comp,
          (s2 * n1 * s2.transpose() + n2 - n12).cwiseAbs().maxCoeff());
      Eigen::JacobiSVD<Mat4> svd(n12);
      const double s0 = svd.singularValues()(0);
      if (s0 > 0.0)
        worst_rank = std::max(worst_rank, svd.singularValues()(2) / s0);
    }
    add("symplectic_form", worst_sym, 1e-10);
    add("propagator_group_law", worst_group, 1e-10);
    add("noise_composition", worst_comp, 1e-10);
    add("noise_rank_two", worst_rank, 1e-10);
  }

  // 2. closed-form noise covariance vs adaptive quadrature
  {
    double worst = 0.0;
    for (int c = 0; c < 8; ++c) {
      const double w = 2.0 * uni(rng), xi2 = uni(rng), xim = uni(rng);
      const double d = 0.5 + std::abs(uni(rng));
      const double t = 0.2 + 2.0 * std::abs(uni(rng));
      const Mat4 closed = noise_covariance(w, xi2, xim, d, t);
      Vec4 v(0.0, -xi2, 0.0, xim);
      Mat4 quad;
      for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
          quad(i, k) = d * integrate(
                               [&](double s) {
                                 const Vec4 sv = propagator(w, s) * v;
                                 return sv(i) * sv(k);
                               },
                               0.0, t, 1e-14);
        }
      const double scale = std::max(1.0, closed.cwiseAbs().maxCoeff());
      worst = std::max(worst, (closed - quad).cwiseAbs().maxCoeff() / scale);
    }
    add("noise_closed_form_vs_quadrature", worst, 1e-10);
  }

  // 3. Fock cat Wigner vs analytic cat formula
  GridSpec grid;
  grid.x_min = grid.p_min = -opts.span;
  grid.x_max = grid.p_max = opts.span;
  grid.n_x = grid.n_p = opts.grid_points;
  {
    const VectorXcd cat = cat_state_fock(opts.alpha, opts.dim);
    const FockDensityMatrix rho = FockDensityMatrix::from_pure(cat, 1, opts.dim);
    const WignerGrid wf = wigner_from_fock(rho, grid);
    const WignerGrid wa = wigner_cat(opts.alpha, grid);
    double worst = 0.0;
    for (size_t k = 0; k < wf.w.size(); ++k)
      worst = std::max(worst, std::abs(wf.w[k] - wa.w[k]));
    add("fock_cat_wigner_vs_analytic", worst, 1e-6);
  }

  // 4. beamsplitter evolution vs Gaussian channel, Wigner pointwise.
  // U(theta) rotates state moments opposite to propagator(+theta), so the
  // grid comparison uses the parity-even cat where both senses coincide.
  {
    const VectorXcd cat = cat_state_fock(opts.alpha, opts.dim);
    const VectorXcd vac = VectorXcd::Unit(opts.dim, 0);
    const FockDensityMatrix joint =
        FockDensityMatrix::from_pure(tensor_product(cat, vac), 2, opts.dim);
    const FockDensityMatrix evolved = evolve_beamsplitter(joint, 0.5 * k_pi);
    const FockDensityMatrix mode2 = partial_trace(evolved, 1);
    const WignerGrid w_fock = wigner_from_fock(mode2, grid);

    const WignerGrid w_in = wigner_cat(opts.alpha, grid);
    const WignerGrid w_chan =
        apply_channel_wigner(w_in, 0.5 * k_pi, Eigen::Matrix2d::Zero());
    double worst = 0.0;
    for (size_t k = 0; k < w_fock.w.size(); ++k)
      worst = std::max(worst, std::abs(w_fock.w[k] - w_chan.w[k]));
    add("fock_transfer_vs_phase_space", worst, 1e-3);

    // photon number conservation under the evolution
    const double n_before = mean_occupation(joint, 0) + mean_occupation(joint, 1);
    const double n_after =
        mean_occupation(evolved, 0) + mean_occupation(evolved, 1);
    add("beamsplitter_number_conservation", std::abs(n_after - n_before), 1e-10);
  }

  // 5. second moments: Fock evolution vs channel algebra (random Gaussians)
  {
    const int dim = std::min(opts.dim, 16);
    const double theta = 0.7;
    const MatrixXcd u = beamsplitter_unitary(dim, theta);
    double worst = 0.0;
    for (int c = 0; c < 5; ++c) {
      const std::complex<double> am(0.6 * uni(rng), 0.6 * uni(rng));
      const std::complex<double> a2(0.6 * uni(rng), 0.6 * uni(rng));
      const VectorXcd psi =
          tensor_product(coherent_state_fock(am, dim), coherent_state_fock(a2, dim));
      const FockDensityMatrix rho = FockDensityMatrix::from_pure(psi, 2, dim);
      const QuadratureState before = quadrature_moments(rho);
      const QuadratureState after = quadrature_moments(conjugate(rho, u));
      // state moments rotate with S(-theta)
      GaussianChannel ch;
      ch.S = propagator(-theta, 1.0);
      const QuadratureState pred = apply_channel_moments(before, ch);
      worst = std::max(worst, (pred.mean - after.mean).cwiseAbs().maxCoeff());
      worst = std::max(worst, (pred.cov - after.cov).cwiseAbs().maxCoeff());
    }
    add("fock_moments_vs_channel", worst, 1e-8);
  }

  // 6. SDE ensemble covariance vs closed form at quarter period
  {
    const double omega = -1.0, xi2 = -0.8, xim = 1.1, d_eff = 0.4;
    SdeOptions so;
    so.t_end = 0.5 * k_pi / std::abs(omega);
    so.dt = 0.002 / std::abs(omega);
    so.n_paths = opts.paths;
    so.seed = opts.seed;
    so.n_threads = 1;
    const SdeEnsemble ens = sde_trajectory(omega, xi2, xim, d_eff, so);
    const Mat4 closed =
        noise_covariance(omega, xi2, xim, d_eff, so.t_end);
    const Mat4& mc = ens.cov.back();
    double worst = 0.0;
    const double floor = 0.01 * closed.cwiseAbs().maxCoeff();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (std::abs(closed(i, j)) > floor)
          worst = std::max(
              worst, std::abs(mc(i, j) - closed(i, j)) / std::abs(closed(i, j)));
    add("sde_covariance_vs_closed_form", worst, 0.10);
  }

  rep.all_passed = true;
  for (const auto& c : rep.checks) rep.all_passed = rep.all_passed && c.passed;
  return rep;
}

}  // namespace becmirror
