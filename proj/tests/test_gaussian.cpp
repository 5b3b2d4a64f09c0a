#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/channel.hpp"
#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/sde.hpp"

using namespace becmirror;

namespace {

// independent quadrature route to N(t)
double simpson_entry(double omega, const Vec4& v, int i, int j, double t) {
  const int n = 4001;
  const double h = t / (n - 1);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec4 sv = propagator(omega, k * h) * v;
    const double f = sv(i) * sv(j);
    const double w = (k == 0 || k == n - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("generator squares to minus identity") {
  const Mat4 m = bs_generator();
  CHECK(((m * m) + Mat4::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagator special values") {
  CHECK((propagator(0.7, 0.0) - Mat4::Identity()).cwiseAbs().maxCoeff() == 0.0);
  const double w = 1.3;
  const Mat4 s = propagator(w, 0.5 * k_pi / w);
  CHECK((s - bs_generator()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("symplectic form and group law over random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Mat4 j = symplectic_form();
  for (int c = 0; c < 100; ++c) {
    const double w = 3.0 * uni(rng);
    const double t1 = 2.0 * std::abs(uni(rng)), t2 = 2.0 * std::abs(uni(rng));
    const Mat4 s1 = propagator(w, t1);
    CHECK((s1 * j * s1.transpose() - j).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((propagator(w, t2) * s1 - propagator(w, t1 + t2)).cwiseAbs().maxCoeff() <=
          1e-10);
  }
}

TEST_CASE("noise covariance edge cases") {
  CHECK(noise_covariance(1.0, 0.5, 0.8, 0.3, 0.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(noise_covariance(1.0, 0.5, 0.8, 0.0, 2.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(noise_covariance(1.0, 0.5, 0.8, -0.1, 1.0), InvalidArgument);
}

TEST_CASE("noise covariance quarter-period closed form") {
  const double w = 1.7, xi2 = -0.9, xim = 1.2, d = 0.6;
  const double t = 0.5 * k_pi / w;
  const Mat4 n = noise_covariance(w, xi2, xim, d, t);
  CHECK(n(0, 0) == doctest::Approx(k_pi * d * xim * xim / (4.0 * w)).epsilon(1e-12));
  CHECK(n(0, 1) == doctest::Approx(d * xi2 * xim / (2.0 * w)).epsilon(1e-12));
  CHECK(n(1, 1) / n(0, 0) ==
        doctest::Approx((xi2 / xim) * (xi2 / xim)).epsilon(1e-12));
}

TEST_CASE("noise covariance agrees with direct quadrature") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int c = 0; c < 6; ++c) {
    const double w = 2.0 * uni(rng);
    const double xi2 = uni(rng), xim = uni(rng);
    const double d = 0.4 + std::abs(uni(rng));
    const double t = 0.3 + 1.5 * std::abs(uni(rng));
    Vec4 v(0.0, -xi2, 0.0, xim);
    const Mat4 closed = noise_covariance(w, xi2, xim, d, t);
    const double scale = std::max(1.0, closed.cwiseAbs().maxCoeff());
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        const double q = d * simpson_entry(w, v, i, j, t);
        CHECK(std::abs(closed(i, j) - q) / scale <= 1e-10);
      }
  }
}

TEST_CASE("noise composition law and rank") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int c = 0; c < 50; ++c) {
    const double w = 2.5 * uni(rng);
    const double xi2 = uni(rng), xim = uni(rng), d = std::abs(uni(rng));
    const double t1 = 1.5 * std::abs(uni(rng)), t2 = 1.5 * std::abs(uni(rng));
    const Mat4 n1 = noise_covariance(w, xi2, xim, d, t1);
    const Mat4 n2 = noise_covariance(w, xi2, xim, d, t2);
    const Mat4 s2 = propagator(w, t2);
    const Mat4 n12 = noise_covariance(w, xi2, xim, d, t1 + t2);
    CHECK((s2 * n1 * s2.transpose() + n2 - n12).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::JacobiSVD<Mat4> svd(n12);
    if (svd.singularValues()(0) > 0.0)
      CHECK(svd.singularValues()(2) <= 1e-10 * svd.singularValues()(0));
  }
}

TEST_CASE("moment map") {
  GaussianChannel id;
  QuadratureState s;
  s.mean << 0.3, -0.2, 1.0, 0.0;
  s.cov = Mat4::Identity() * 1.5;

  SUBCASE("identity channel") {
    const QuadratureState r = apply_channel_moments(s, id);
    CHECK((r.mean - s.mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.cov - s.cov).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("vacuum is invariant under noiseless rotation") {
    QuadratureState vac;
    GaussianChannel ch = GaussianChannel::make(1.0, 0.0, 0.0, 0.0, 0.45 * k_pi);
    const QuadratureState r = apply_channel_moments(vac, ch);
    CHECK((r.cov - Mat4::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("non-PSD covariance is rejected") {
    s.cov(0, 0) = -1.0;
    CHECK_THROWS_AS(apply_channel_moments(s, id), InvalidArgument);
  }

  SUBCASE("determinant never decreases when noise is added") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int c = 0; c < 40; ++c) {
      Mat4 a;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = uni(rng);
      QuadratureState q;
      q.cov = a * a.transpose() + 0.2 * Mat4::Identity();
      const GaussianChannel ch = GaussianChannel::make(
          2.0 * uni(rng), uni(rng), uni(rng), std::abs(uni(rng)),
          std::abs(uni(rng)));
      const QuadratureState r = apply_channel_moments(q, ch);
      CHECK(r.cov.determinant() >= q.cov.determinant() * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("channel validation") {
  GaussianChannel ch = GaussianChannel::make(1.1, -0.7, 0.9, 0.5, 0.8);
  ch.validate();
  ch.S(0, 0) += 1e-3;
  CHECK_THROWS_AS(ch.validate(), InvalidArgument);
}

TEST_CASE("sde input validation") {
  SdeOptions o;
  o.dt = 1.0;  // far above 0.01 / |omega|
  o.t_end = 1.0;
  CHECK_THROWS_WITH_AS(sde_trajectory(5.0, 0.1, 0.1, 0.0, o),
                       doctest::Contains("dt too large"), InvalidArgument);
  o.dt = 1e-4;
  o.n_paths = 0;
  CHECK_THROWS_AS(sde_trajectory(5.0, 0.1, 0.1, 0.0, o), InvalidArgument);
}

TEST_CASE("sde noiseless limit converges at first order to the rotation") {
  const double w = 2.0;
  auto run_error = [&](double dt_scale) {
    SdeOptions o;
    o.dt = dt_scale / w;
    o.t_end = 0.5 * k_pi / w;
    o.n_paths = 1;
    o.initial_mean << 1.0, 0.0, 0.0, 0.0;
    const SdeEnsemble e = sde_trajectory(w, 0.4, 0.6, 0.0, o);
    const Vec4 expected = propagator(w, o.t_end) * o.initial_mean;
    return (e.mean.back() - expected).cwiseAbs().maxCoeff();
  };
  const double e1 = run_error(1e-3);
  const double e2 = run_error(5e-4);
  CHECK(e1 < 2e-3);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));  // first order in dt
}

TEST_CASE("sde determinism and thread invariance") {
  SdeOptions o;
  o.dt = 1e-3;
  o.t_end = 1.2;
  o.n_paths = 600;
  o.seed = 99;
  const SdeEnsemble a = sde_trajectory(1.0, -0.5, 0.8, 0.4, o);
  const SdeEnsemble b = sde_trajectory(1.0, -0.5, 0.8, 0.4, o);
  o.n_threads = 4;
  const SdeEnsemble c = sde_trajectory(1.0, -0.5, 0.8, 0.4, o);
  REQUIRE(a.times.size() == b.times.size());
  REQUIRE(a.times.size() == c.times.size());
  for (size_t s = 0; s < a.times.size(); ++s) {
    CHECK((a.mean[s] - b.mean[s]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.cov[s] - b.cov[s]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.mean[s] - c.mean[s]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.cov[s] - c.cov[s]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("sde ensemble covariance approaches the closed form") {
  const double w = -1.0, xi2 = -0.8, xim = 1.1, d = 0.4;
  SdeOptions o;
  o.dt = 0.002;
  o.t_end = 0.5 * k_pi;
  o.n_paths = 2000;
  o.seed = 4242;
  const SdeEnsemble e = sde_trajectory(w, xi2, xim, d, o);
  const Mat4 closed = noise_covariance(w, xi2, xim, d, o.t_end);
  const double floor = 0.01;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (std::abs(closed(i, j)) > floor)
        CHECK(e.cov.back()(i, j) ==
              doctest::Approx(closed(i, j)).epsilon(0.10));
}
