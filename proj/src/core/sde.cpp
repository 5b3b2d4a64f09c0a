#include "core/sde.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "core/errors.hpp"
#include "core/philox.hpp"

namespace becmirror {

namespace {

constexpr long long kBlockSize = 256;  // paths per reduction block

struct BlockAccum {
  std::vector<Vec4> sum;             // per sample
  std::vector<Mat4> sum_outer;       // per sample
};

}  // namespace

SdeEnsemble sde_trajectory(double omega_st, double xi_2, double xi_m,
                           double d_eff, const SdeOptions& opts) {
  if (!(opts.dt > 0.0)) throw InvalidArgument("sde: dt must be positive");
  if (opts.t_end < 0.0) throw InvalidArgument("sde: t_end must be >= 0");
  if (opts.n_paths < 1) throw InvalidArgument("sde: n_paths must be >= 1");
  if (d_eff < 0.0) throw InvalidArgument("sde: noise strength must be >= 0");
  if (omega_st != 0.0 && opts.dt > 0.01 / std::abs(omega_st))
    throw InvalidArgument(
        "sde: dt too large for stable integration (need dt <= 0.01/|omega_st|)");

  const long long n_steps =
      opts.t_end == 0.0
          ? 0
          : std::max<long long>(1, (long long)std::ceil(opts.t_end / opts.dt - 1e-9));
  const double dt = opts.t_end == 0.0 ? opts.dt : opts.t_end / (double)n_steps;

  int stride = opts.sample_stride;
  if (stride <= 0) stride = std::max<long long>(1, n_steps / 512);
  // sample at step 0, every stride-th step, and always at the final step
  std::vector<long long> sample_steps;
  for (long long s = 0; s < n_steps; s += stride) sample_steps.push_back(s);
  sample_steps.push_back(n_steps);
  const long long n_samples = (long long)sample_steps.size();

  const Mat4 drift = omega_st * bs_generator();
  const Vec4 noise_vec(0.0, -xi_2, 0.0, xi_m);
  const double noise_scale = std::sqrt(d_eff * dt);
  const bool store_paths = opts.n_paths <= opts.store_paths_limit;

  SdeEnsemble out;
  out.dt = dt;
  out.n_paths = opts.n_paths;
  out.times.resize(n_samples);
  for (long long s = 0; s < n_samples; ++s)
    out.times[s] = (double)sample_steps[s] * dt;
  if (store_paths)
    out.paths.assign(opts.n_paths, std::vector<Vec4>(n_samples, Vec4::Zero()));

  const long long n_blocks = (opts.n_paths + kBlockSize - 1) / kBlockSize;
  std::vector<BlockAccum> blocks(n_blocks);

  auto run_block = [&](long long b) {
    BlockAccum& acc = blocks[b];
    acc.sum.assign(n_samples, Vec4::Zero());
    acc.sum_outer.assign(n_samples, Mat4::Zero());
    const long long p_lo = b * kBlockSize;
    const long long p_hi = std::min<long long>(opts.n_paths, p_lo + kBlockSize);
    for (long long path = p_lo; path < p_hi; ++path) {
      Vec4 z = opts.initial_mean;
      long long sample = 0;
      auto record = [&] {
        acc.sum[sample] += z;
        acc.sum_outer[sample] += z * z.transpose();
        if (store_paths) out.paths[path][sample] = z;
        ++sample;
      };
      record();
      for (long long step = 0; step < n_steps; ++step) {
        const double dw = noise_scale * philox_normal(opts.seed, path, step);
        z += dt * (drift * z) + noise_vec * dw;
        if (sample < n_samples && sample_steps[sample] == step + 1) record();
      }
    }
  };

  const int n_threads = std::max(1, opts.n_threads);
  if (n_threads == 1 || n_blocks == 1) {
    for (long long b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (long long b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
          run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  // combine blocks in index order so the reduction is thread-count invariant
  out.mean.assign(n_samples, Vec4::Zero());
  out.cov.assign(n_samples, Mat4::Zero());
  for (long long s = 0; s < n_samples; ++s) {
    Vec4 sum = Vec4::Zero();
    Mat4 sum_outer = Mat4::Zero();
    for (long long b = 0; b < n_blocks; ++b) {
      sum += blocks[b].sum[s];
      sum_outer += blocks[b].sum_outer[s];
    }
    const double inv_n = 1.0 / (double)opts.n_paths;
    out.mean[s] = sum * inv_n;
    Mat4 c = sum_outer * inv_n - out.mean[s] * out.mean[s].transpose();
    out.cov[s] = 0.5 * (c + c.transpose());
  }
  return out;
}

}  // namespace becmirror
