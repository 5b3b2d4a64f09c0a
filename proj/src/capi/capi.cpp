#include "becmirror.h"

#include <cstring>
#include <sstream>
#include <string>

#include "core/channel.hpp"
#include "core/errors.hpp"
#include "core/fock.hpp"
#include "core/full_model.hpp"
#include "core/io.hpp"
#include "core/oracle.hpp"
#include "core/params.hpp"
#include "core/sde.hpp"
#include "core/wigner.hpp"

namespace bm = becmirror;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Translate C++ exceptions into status codes; every API call funnels here.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return BM_OK;
  } catch (const bm::BracketError& e) {
    std::ostringstream os;
    os << e.what() << "; sampled residuals:";
    for (const auto& [v, r] : e.sampled_residuals) os << " f(" << v << ")=" << r;
    set_error(os.str());
    return BM_ERR_BRACKET;
  } catch (const bm::ConvergenceError& e) {
    std::ostringstream os;
    os << e.what() << " (last iterate " << e.last_iterate << ", residual "
       << e.residual << ", iterations " << e.iterations << ")";
    set_error(os.str());
    return BM_ERR_NOT_CONVERGED;
  } catch (const bm::SizeError& e) {
    set_error(e.what());
    return BM_ERR_SIZE_LIMIT;
  } catch (const bm::GridError& e) {
    set_error(e.what());
    return BM_ERR_GRID;
  } catch (const bm::DivergenceError& e) {
    std::ostringstream os;
    os << e.what() << " at t = " << e.time;
    set_error(os.str());
    return BM_ERR_DIVERGED;
  } catch (const bm::IoError& e) {
    set_error(e.what());
    return BM_ERR_IO;
  } catch (const bm::InvalidArgument& e) {
    set_error(e.what());
    return BM_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return BM_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return BM_ERR_INTERNAL;
  }
}

int require(bool ok, const char* msg) {
  if (ok) return BM_OK;
  set_error(msg);
  return BM_ERR_INVALID_ARGUMENT;
}

bm::PhysicalParams to_core(const bm_physical_params& p) {
  bm::PhysicalParams c;
  c.mirror_mass = p.mirror_mass_kg;
  c.mirror_omega = p.mirror_omega_rad_s;
  c.cavity_length = p.cavity_length_m;
  c.kappa = p.kappa_rad_s;
  c.detuning_c = p.detuning_c_rad_s;
  c.pump_rate = p.pump_rate_rad_s;
  c.wavelength = p.wavelength_m;
  c.atom_mass = p.atom_mass_kg;
  c.atom_number = p.atom_number;
  c.detuning_a = p.detuning_a_rad_s;
  c.coupling_g = p.coupling_g_rad_s;
  c.detuning_is_effective = p.detuning_is_effective != 0;
  return c;
}

bm_physical_params from_core(const bm::PhysicalParams& c) {
  bm_physical_params p;
  p.mirror_mass_kg = c.mirror_mass;
  p.mirror_omega_rad_s = c.mirror_omega;
  p.cavity_length_m = c.cavity_length;
  p.kappa_rad_s = c.kappa;
  p.detuning_c_rad_s = c.detuning_c;
  p.pump_rate_rad_s = c.pump_rate;
  p.wavelength_m = c.wavelength;
  p.atom_mass_kg = c.atom_mass;
  p.detuning_a_rad_s = c.detuning_a;
  p.coupling_g_rad_s = c.coupling_g;
  p.atom_number = c.atom_number;
  p.detuning_is_effective = c.detuning_is_effective ? 1 : 0;
  return p;
}

void mat_to_c(const bm::Mat4& m, double* out) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i * 4 + j] = m(i, j);
}

bm::Mat4 mat_from_c(const double* in) {
  bm::Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = in[i * 4 + j];
  return m;
}

bm::GridSpec spec_from_c(const bm_grid_spec& s) {
  bm::GridSpec g;
  g.x_min = s.x_min;
  g.x_max = s.x_max;
  g.n_x = (int)s.n_x;
  g.p_min = s.p_min;
  g.p_max = s.p_max;
  g.n_p = (int)s.n_p;
  return g;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

double json_number(const std::string& text, const char* key, double fallback) {
  const std::string needle = std::string("\"") + key + "\"";
  size_t pos = text.find(needle);
  if (pos == std::string::npos) return fallback;
  pos = text.find(':', pos + needle.size());
  if (pos == std::string::npos) return fallback;
  return std::strtod(text.c_str() + pos + 1, nullptr);
}

}  // namespace

struct bm_wigner_grid {
  bm::WignerGrid grid;
};

struct bm_sde_result {
  bm::SdeEnsemble ensemble;
};

struct bm_timeseries {
  bm::TimeSeries series;
};

extern "C" {

const char* bm_version(void) { return "0.1.0"; }

const char* bm_status_name(int status) {
  switch (status) {
    case BM_OK: return "ok";
    case BM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BM_ERR_NOT_CONVERGED: return "not converged";
    case BM_ERR_BRACKET: return "bracketing error";
    case BM_ERR_SIZE_LIMIT: return "size limit exceeded";
    case BM_ERR_GRID: return "grid error";
    case BM_ERR_IO: return "io error";
    case BM_ERR_DIVERGED: return "diverged";
    default: return "internal error";
  }
}

const char* bm_last_error(void) { return g_last_error.c_str(); }

int bm_derive(const bm_physical_params* p, bm_derived_params* out) {
  if (int rc = require(p && out, "bm_derive: null argument")) return rc;
  return guarded([&] {
    const bm::DerivedParams d = bm::derive(to_core(*p));
    out->k_laser_rad_m = d.k_laser;
    out->omega_cavity_rad_s = d.omega_cavity;
    out->xi_rad_s_m = d.xi;
    out->x_zp_m = d.x_zp;
    out->x_zp_wide_m = d.x_zp_wide;
    out->xi_m_rad_s = d.xi_m;
    out->xi_2_rad_s = d.xi_2;
    out->omega_2_rad_s = d.omega_2;
    out->delta_tilde_rad_s = d.delta_tilde;
    out->n_cav = d.n_cav;
    out->phi_estimate_rad_s = d.phi_estimate;
    out->omega_m_shifted_rad_s = d.omega_m_shifted;
    out->omega_2_shifted_rad_s = d.omega_2_shifted;
    out->omega_st_rad_s = d.omega_st;
    out->d_chi = d.d_chi;
    out->t_transfer_s = d.t_transfer;
  });
}

int bm_steady_state_solve(const bm_physical_params* p, int max_iterations,
                          int disable_backaction, bm_steady_state* out) {
  if (int rc = require(p && out, "bm_steady_state_solve: null argument")) return rc;
  return guarded([&] {
    bm::SteadyStateOptions opts;
    if (max_iterations > 0) opts.max_iterations = max_iterations;
    opts.disable_backaction = disable_backaction != 0;
    const bm::SteadyState s = bm::steady_state(to_core(*p), opts);
    out->a_re = s.a.real();
    out->a_im = s.a.imag();
    out->n_cav = s.n_cav;
    out->phi_rad_s = s.phi;
    out->mean_x_m = s.mean_x_m;
    out->mean_x_2 = s.mean_x_2;
    out->phase_shift_negligible = s.phase_shift_negligible ? 1 : 0;
    out->iterations = s.iterations;
    out->residual = s.residual;
  });
}

int bm_match_frequencies(const bm_physical_params* p, const char* free_parameter,
                         double bracket_lo, double bracket_hi,
                         bm_physical_params* out, double* residual) {
  if (int rc = require(p && out && free_parameter,
                       "bm_match_frequencies: null argument"))
    return rc;
  return guarded([&] {
    const bm::FreeParameter which =
        bm::free_parameter_from_string(free_parameter);
    double res = 0.0;
    const bm::PhysicalParams matched =
        bm::match_frequencies(to_core(*p), which, bracket_lo, bracket_hi, &res);
    *out = from_core(matched);
    if (residual) *residual = res;
  });
}

int bm_propagator(double omega_st, double t, double s_out[16]) {
  if (int rc = require(s_out, "bm_propagator: null output")) return rc;
  return guarded([&] { mat_to_c(bm::propagator(omega_st, t), s_out); });
}

int bm_noise_covariance(double omega_st, double xi_2, double xi_m, double d_eff,
                        double t, double n_out[16]) {
  if (int rc = require(n_out, "bm_noise_covariance: null output")) return rc;
  return guarded(
      [&] { mat_to_c(bm::noise_covariance(omega_st, xi_2, xi_m, d_eff, t), n_out); });
}

int bm_apply_channel_moments(const double mean[4], const double cov[16],
                             const double s[16], const double n[16],
                             double mean_out[4], double cov_out[16]) {
  if (int rc = require(mean && cov && s && n && mean_out && cov_out,
                       "bm_apply_channel_moments: null argument"))
    return rc;
  return guarded([&] {
    bm::QuadratureState st;
    for (int i = 0; i < 4; ++i) st.mean(i) = mean[i];
    st.cov = mat_from_c(cov);
    bm::GaussianChannel ch;
    ch.S = mat_from_c(s);
    ch.N = mat_from_c(n);
    const bm::QuadratureState r = bm::apply_channel_moments(st, ch);
    for (int i = 0; i < 4; ++i) mean_out[i] = r.mean(i);
    mat_to_c(r.cov, cov_out);
  });
}

int bm_sde_run(double omega_st, double xi_2, double xi_m, double d_eff,
               const double initial_mean[4], uint64_t seed, double dt,
               double t_end, long long n_paths, int n_threads,
               bm_sde_result** out) {
  if (int rc = require(out, "bm_sde_run: null output")) return rc;
  return guarded([&] {
    bm::SdeOptions opts;
    opts.dt = dt;
    opts.t_end = t_end;
    opts.n_paths = n_paths;
    opts.seed = seed;
    opts.n_threads = n_threads;
    if (initial_mean)
      for (int i = 0; i < 4; ++i) opts.initial_mean(i) = initial_mean[i];
    auto* r = new bm_sde_result{bm::sde_trajectory(omega_st, xi_2, xi_m, d_eff, opts)};
    *out = r;
  });
}

int bm_sde_sample_count(const bm_sde_result* r, long long* count) {
  if (int rc = require(r && count, "bm_sde_sample_count: null argument")) return rc;
  *count = (long long)r->ensemble.times.size();
  return BM_OK;
}

int bm_sde_ensemble_at(const bm_sde_result* r, long long sample, double* t,
                       double mean[4], double cov[16]) {
  if (int rc = require(r, "bm_sde_ensemble_at: null handle")) return rc;
  if (int rc = require(sample >= 0 && sample < (long long)r->ensemble.times.size(),
                       "bm_sde_ensemble_at: sample out of range"))
    return rc;
  if (t) *t = r->ensemble.times[sample];
  if (mean)
    for (int i = 0; i < 4; ++i) mean[i] = r->ensemble.mean[sample](i);
  if (cov) mat_to_c(r->ensemble.cov[sample], cov);
  return BM_OK;
}

int bm_sde_write_csv(const bm_sde_result* r, const char* path) {
  if (int rc = require(r && path, "bm_sde_write_csv: null argument")) return rc;
  return guarded([&] { bm::write_ensemble_csv(r->ensemble, path); });
}

void bm_sde_free(bm_sde_result* r) { delete r; }

int bm_wigner_state(int kind, double alpha, const bm_grid_spec* spec,
                    bm_wigner_grid** out) {
  if (int rc = require(spec && out, "bm_wigner_state: null argument")) return rc;
  return guarded([&] {
    const bm::GridSpec g = spec_from_c(*spec);
    bm::WignerGrid w;
    switch (kind) {
      case 0: w = bm::wigner_vacuum(g); break;
      case 1: w = bm::wigner_coherent(alpha, g); break;
      case 2: w = bm::wigner_thermal(alpha, g); break;
      case 3: w = bm::wigner_cat(alpha, g); break;
      default: throw bm::InvalidArgument("bm_wigner_state: unknown state kind");
    }
    *out = new bm_wigner_grid{std::move(w)};
  });
}

int bm_wigner_apply_channel(const bm_wigner_grid* in, double theta,
                            const double n22[4], bm_wigner_grid** out) {
  if (int rc = require(in && n22 && out, "bm_wigner_apply_channel: null argument"))
    return rc;
  return guarded([&] {
    Eigen::Matrix2d n;
    n << n22[0], n22[1], n22[2], n22[3];
    *out = new bm_wigner_grid{bm::apply_channel_wigner(in->grid, theta, n)};
  });
}

int bm_wigner_overlap(const bm_wigner_grid* a, const bm_wigner_grid* b,
                      double* trace_overlap, double* normalized_overlap) {
  if (int rc = require(a && b, "bm_wigner_overlap: null argument")) return rc;
  return guarded([&] {
    const bm::OverlapResult r = bm::overlap_fidelity(a->grid, b->grid);
    if (trace_overlap) *trace_overlap = r.trace_overlap;
    if (normalized_overlap) *normalized_overlap = r.normalized_overlap;
  });
}

int bm_wigner_marginals(const bm_wigner_grid* g, double* px, double* pp) {
  if (int rc = require(g, "bm_wigner_marginals: null handle")) return rc;
  return guarded([&] {
    const bm::Marginals m = bm::marginals(g->grid);
    if (px)
      for (size_t i = 0; i < m.x.size(); ++i) px[i] = m.x[i];
    if (pp)
      for (size_t j = 0; j < m.p.size(); ++j) pp[j] = m.p[j];
  });
}

int bm_wigner_spec(const bm_wigner_grid* g, bm_grid_spec* spec) {
  if (int rc = require(g && spec, "bm_wigner_spec: null argument")) return rc;
  spec->x_min = g->grid.spec.x_min;
  spec->x_max = g->grid.spec.x_max;
  spec->n_x = g->grid.spec.n_x;
  spec->p_min = g->grid.spec.p_min;
  spec->p_max = g->grid.spec.p_max;
  spec->n_p = g->grid.spec.n_p;
  return BM_OK;
}

int bm_wigner_values(const bm_wigner_grid* g, const double** values) {
  if (int rc = require(g && values, "bm_wigner_values: null argument")) return rc;
  *values = g->grid.w.data();
  return BM_OK;
}

int bm_wigner_integral(const bm_wigner_grid* g, double* integral) {
  if (int rc = require(g && integral, "bm_wigner_integral: null argument")) return rc;
  *integral = g->grid.integral();
  return BM_OK;
}

int bm_wigner_min(const bm_wigner_grid* g, double* min_value) {
  if (int rc = require(g && min_value, "bm_wigner_min: null argument")) return rc;
  *min_value = g->grid.min_value();
  return BM_OK;
}

int bm_wigner_flags(const bm_wigner_grid* g, int* fringe_warning,
                    double* renorm_drift) {
  if (int rc = require(g, "bm_wigner_flags: null handle")) return rc;
  if (fringe_warning) *fringe_warning = g->grid.fringe_warning ? 1 : 0;
  if (renorm_drift) *renorm_drift = g->grid.renorm_drift;
  return BM_OK;
}

int bm_wigner_write_csv(const bm_wigner_grid* g, const char* path) {
  if (int rc = require(g && path, "bm_wigner_write_csv: null argument")) return rc;
  return guarded([&] { bm::write_wigner_csv(g->grid, path); });
}

int bm_wigner_write_json(const bm_wigner_grid* g, const char* path) {
  if (int rc = require(g && path, "bm_wigner_write_json: null argument")) return rc;
  return guarded([&] { bm::write_wigner_json(g->grid, path); });
}

int bm_wigner_read_csv(const char* path, bm_wigner_grid** out) {
  if (int rc = require(path && out, "bm_wigner_read_csv: null argument")) return rc;
  return guarded([&] { *out = new bm_wigner_grid{bm::read_wigner_csv(path)}; });
}

int bm_wigner_write_pgm(const bm_wigner_grid* g, const char* path) {
  if (int rc = require(g && path, "bm_wigner_write_pgm: null argument")) return rc;
  return guarded([&] { bm::write_wigner_pgm(g->grid, path); });
}

int bm_wigner_write_ppm(const bm_wigner_grid* g, const char* path) {
  if (int rc = require(g && path, "bm_wigner_write_ppm: null argument")) return rc;
  return guarded([&] { bm::write_wigner_ppm(g->grid, path); });
}

void bm_wigner_free(bm_wigner_grid* g) { delete g; }

int bm_full_model_integrate(const bm_physical_params* p, const double s0[6],
                            double t_end, double tol, long long n_samples,
                            double velocity_damping, bm_timeseries** out) {
  if (int rc = require(p && s0 && out, "bm_full_model_integrate: null argument"))
    return rc;
  return guarded([&] {
    bm::FullModelParams f = bm::FullModelParams::from_physical(to_core(*p));
    f.velocity_damping = velocity_damping;
    bm::FullState y0;
    for (int i = 0; i < 6; ++i) y0(i) = s0[i];
    bm::IntegrateOptions opts;
    opts.t_end = t_end;
    opts.tol = tol;
    if (n_samples > 0) opts.n_samples = n_samples;
    *out = new bm_timeseries{bm::integrate_full_model(f, y0, opts)};
  });
}

int bm_timeseries_count(const bm_timeseries* ts, long long* count) {
  if (int rc = require(ts && count, "bm_timeseries_count: null argument")) return rc;
  *count = (long long)ts->series.t.size();
  return BM_OK;
}

int bm_timeseries_row(const bm_timeseries* ts, long long row, double* t,
                      double state[6]) {
  if (int rc = require(ts, "bm_timeseries_row: null handle")) return rc;
  if (int rc = require(row >= 0 && row < (long long)ts->series.t.size(),
                       "bm_timeseries_row: row out of range"))
    return rc;
  if (t) *t = ts->series.t[row];
  if (state)
    for (int i = 0; i < 6; ++i) state[i] = ts->series.y[row](i);
  return BM_OK;
}

int bm_timeseries_write_csv(const bm_timeseries* ts, const char* path) {
  if (int rc = require(ts && path, "bm_timeseries_write_csv: null argument"))
    return rc;
  return guarded([&] { bm::write_timeseries_csv(ts->series, path); });
}

void bm_timeseries_free(bm_timeseries* ts) { delete ts; }

int bm_steady_full_state(const bm_physical_params* p, double state[6]) {
  if (int rc = require(p && state, "bm_steady_full_state: null argument")) return rc;
  return guarded([&] {
    const bm::FullState s = bm::steady_full_state(to_core(*p));
    for (int i = 0; i < 6; ++i) state[i] = s(i);
  });
}

int bm_linearized_spectrum(const bm_physical_params* p, double eig_re[6],
                           double eig_im[6], int* stable) {
  if (int rc = require(p && eig_re && eig_im, "bm_linearized_spectrum: null argument"))
    return rc;
  return guarded([&] {
    const bm::Spectrum s = bm::linearized_spectrum(to_core(*p));
    for (int i = 0; i < 6; ++i) {
      eig_re[i] = s.eigenvalues[i].real();
      eig_im[i] = s.eigenvalues[i].imag();
    }
    if (stable) *stable = s.stable ? 1 : 0;
  });
}

int bm_oracle_check(const char* options_json, char** report_json) {
  if (int rc = require(report_json, "bm_oracle_check: null output")) return rc;
  return guarded([&] {
    bm::OracleOptions opts;
    if (options_json) {
      const std::string text(options_json);
      opts.dim = (int)json_number(text, "dim", opts.dim);
      opts.grid_points = (int)json_number(text, "grid_points", opts.grid_points);
      opts.span = json_number(text, "span", opts.span);
      opts.alpha = json_number(text, "alpha", opts.alpha);
      opts.paths = (long long)json_number(text, "paths", (double)opts.paths);
      opts.seed = (uint64_t)json_number(text, "seed", (double)opts.seed);
      opts.tolerance_scale =
          json_number(text, "tolerance_scale", opts.tolerance_scale);
    }
    const bm::OracleReport rep = bm::oracle_check(opts);
    std::ostringstream os;
    os << "{\"all_passed\":" << (rep.all_passed ? "true" : "false")
       << ",\"checks\":[";
    for (size_t i = 0; i < rep.checks.size(); ++i) {
      const auto& c = rep.checks[i];
      if (i) os << ',';
      os << "{\"name\":\"" << json_escape(c.name) << "\","
         << "\"passed\":" << (c.passed ? "true" : "false") << ","
         << "\"measured\":" << bm::format_double(c.measured) << ","
         << "\"tolerance\":" << bm::format_double(c.tolerance) << "}";
    }
    os << "]}";
    const std::string s = os.str();
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *report_json = buf;
  });
}

void bm_string_free(char* s) { delete[] s; }

}  // extern "C"
