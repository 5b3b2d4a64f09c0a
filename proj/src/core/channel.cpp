#include "core/channel.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace becmirror {

Mat4 bs_generator() {
  Mat4 m;
  m << 0, 0, 0, -1,
       0, 0, 1, 0,
       0, -1, 0, 0,
       1, 0, 0, 0;
  return m;
}

Mat4 symplectic_form() {
  Mat4 j = Mat4::Zero();
  j(0, 1) = 1; j(1, 0) = -1;
  j(2, 3) = 1; j(3, 2) = -1;
  return j;
}

void QuadratureState::validate() const {
  if (!mean.allFinite() || !cov.allFinite())
    throw InvalidArgument("quadrature state has non-finite entries");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("covariance is not symmetric (tolerance 1e-12)");
  Eigen::SelfAdjointEigenSolver<Mat4> es(cov);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw InvalidArgument("covariance is not positive semidefinite");
}

Mat4 propagator(double omega_st, double t) {
  const double th = omega_st * t;
  return std::cos(th) * Mat4::Identity() + std::sin(th) * bs_generator();
}

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

Mat4 noise_covariance(double omega_st, double xi_2, double xi_m, double d_eff,
                      double t) {
  if (d_eff < 0.0) throw InvalidArgument("noise strength must be >= 0");
  if (t < 0.0) throw InvalidArgument("duration must be >= 0");
  Vec4 v(0.0, -xi_2, 0.0, xi_m);
  Vec4 mv = bs_generator() * v;
  const double th = omega_st * t;
  const double a = 0.5 * t * (1.0 + sinc(2.0 * th));
  const double b = 0.5 * t * (1.0 - sinc(2.0 * th));
  const double c = 0.5 * t * std::sin(th) * sinc(th);
  Mat4 n = d_eff * (a * v * v.transpose() + b * mv * mv.transpose() +
                    c * (v * mv.transpose() + mv * v.transpose()));
  return 0.5 * (n + n.transpose());
}

GaussianChannel GaussianChannel::make(double omega_st, double xi_2,
                                      double xi_m, double d_eff, double t) {
  GaussianChannel ch;
  ch.S = propagator(omega_st, t);
  ch.N = noise_covariance(omega_st, xi_2, xi_m, d_eff, t);
  ch.duration = t;
  return ch;
}

void GaussianChannel::validate() const {
  const Mat4 j = symplectic_form();
  if ((S * j * S.transpose() - j).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("channel matrix is not symplectic");
  if ((N - N.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("channel noise is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat4> es(N);
  const double scale = std::max(1.0, N.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw InvalidArgument("channel noise is not positive semidefinite");
}

QuadratureState apply_channel_moments(const QuadratureState& state,
                                      const GaussianChannel& ch) {
  state.validate();
  QuadratureState out;
  out.mean = ch.S * state.mean;
  Mat4 c = ch.S * state.cov * ch.S.transpose() + ch.N;
  out.cov = 0.5 * (c + c.transpose());
  return out;
}

}  // namespace becmirror
