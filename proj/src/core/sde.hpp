#pragma once

#include <cstdint>
#include <vector>

#include "core/channel.hpp"

namespace becmirror {

struct SdeOptions {
  double dt = 0.0;             // s; must satisfy dt <= 0.01 / |omega_st|
  double t_end = 0.0;          // s
  long long n_paths = 1;
  uint64_t seed = 0;
  Vec4 initial_mean = Vec4::Zero();
  int sample_stride = 0;       // 0 = choose automatically (<= ~512 samples)
  int n_threads = 1;
  long long store_paths_limit = 64;  // keep per-path series only below this
};

struct SdeEnsemble {
  std::vector<double> times;
  std::vector<Vec4> mean;          // ensemble mean per sample time
  std::vector<Mat4> cov;           // ensemble covariance per sample time
  std::vector<std::vector<Vec4>> paths;  // per path, per sample (may be empty)
  double dt = 0.0;                 // actual step used
  long long n_paths = 0;
};

/// Euler-Maruyama integration of
///   dz = omega_st M z dt + v sqrt(d_eff) dW,   v = (0, -xi_2, 0, xi_m),
/// with a single shared Wiener increment per step driving both momenta.
/// Deterministic given (seed, dt, t_end, n_paths); the ensemble reduction
/// uses a fixed block order so serial and threaded runs agree bit for bit.
SdeEnsemble sde_trajectory(double omega_st, double xi_2, double xi_m,
                           double d_eff, const SdeOptions& opts);

}  // namespace becmirror
