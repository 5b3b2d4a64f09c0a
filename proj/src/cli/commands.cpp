#include "cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>
#include <vector>

#include <json.hpp>

#include "becmirror.h"
#include "cli/config.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace bmcli {

namespace {

constexpr double k_pi = 3.14159265358979323846;

// Numerical failure carrying the library status for the error report.
struct NumericalError : std::runtime_error {
  NumericalError(int status, const std::string& msg)
      : std::runtime_error(msg), status(status) {}
  int status;
};

void check(int rc, const std::string& context) {
  if (rc == BM_OK) return;
  const std::string msg =
      context + ": " + bm_status_name(rc) + " (" + bm_last_error() + ")";
  if (rc == BM_ERR_INVALID_ARGUMENT || rc == BM_ERR_IO)
    throw ConfigError(msg);
  throw NumericalError(rc, msg);
}

struct GridDeleter {
  void operator()(bm_wigner_grid* g) const { bm_wigner_free(g); }
};
using GridPtr = std::unique_ptr<bm_wigner_grid, GridDeleter>;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RunConfig load_config(const CliOptions& opt, const std::string& command) {
  if (opt.config_path.empty())
    throw ConfigError("--config is required for this subcommand");
  RunConfig cfg = parse_config(read_file(opt.config_path));
  require_for_command(cfg, command);
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.seed_set) cfg.experiment.seed = opt.seed;
  if (opt.grid_n_x > 0) {
    cfg.experiment.grid_points = opt.grid_n_x;
    if (opt.grid_n_p > 0 && opt.grid_n_p != opt.grid_n_x)
      throw ConfigError("transfer grids must be square (NxN)");
  }
  if (opt.span > 0.0) cfg.experiment.grid_span = opt.span;
  return cfg;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw ConfigError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

json params_json(const bm_physical_params& p) {
  return json{{"mirror_mass_kg", p.mirror_mass_kg},
              {"mirror_omega_rad_s", p.mirror_omega_rad_s},
              {"cavity_length_m", p.cavity_length_m},
              {"kappa_rad_s", p.kappa_rad_s},
              {"detuning_c_rad_s", p.detuning_c_rad_s},
              {"pump_rate_rad_s", p.pump_rate_rad_s},
              {"laser_wavelength_m", p.wavelength_m},
              {"atom_mass_kg", p.atom_mass_kg},
              {"atom_number", p.atom_number},
              {"detuning_a_rad_s", p.detuning_a_rad_s},
              {"coupling_g_rad_s", p.coupling_g_rad_s},
              {"detuning_is_effective", p.detuning_is_effective != 0}};
}

json derived_json(const bm_derived_params& d) {
  return json{{"k_laser_rad_m", d.k_laser_rad_m},
              {"omega_cavity_rad_s", d.omega_cavity_rad_s},
              {"xi_rad_s_m", d.xi_rad_s_m},
              {"x_zp_m", d.x_zp_m},
              {"x_zp_wide_m", d.x_zp_wide_m},
              {"xi_m_rad_s", d.xi_m_rad_s},
              {"xi_2_rad_s", d.xi_2_rad_s},
              {"omega_2_rad_s", d.omega_2_rad_s},
              {"delta_tilde_rad_s", d.delta_tilde_rad_s},
              {"n_cav", d.n_cav},
              {"phi_estimate_rad_s", d.phi_estimate_rad_s},
              {"omega_m_shifted_rad_s", d.omega_m_shifted_rad_s},
              {"omega_2_shifted_rad_s", d.omega_2_shifted_rad_s},
              {"omega_st_rad_s", d.omega_st_rad_s},
              {"d_chi", d.d_chi},
              {"t_transfer_s", d.t_transfer_s}};
}

json steady_json(const bm_steady_state& s) {
  return json{{"a_re", s.a_re},
              {"a_im", s.a_im},
              {"n_cav", s.n_cav},
              {"phi_rad_s", s.phi_rad_s},
              {"mean_x_m", s.mean_x_m},
              {"mean_x_2", s.mean_x_2},
              {"phase_shift_negligible", s.phase_shift_negligible != 0},
              {"iterations", s.iterations},
              {"residual", s.residual}};
}

int state_kind(const std::string& name) {
  if (name == "vacuum") return 0;
  if (name == "coherent") return 1;
  if (name == "thermal") return 2;
  return 3;  // cat
}

struct TransferResult {
  bm_physical_params used_params{};
  bm_derived_params derived{};
  bm_steady_state steady{};
  bool matched = false;
  double match_residual = 0.0;
  double d_eff = 0.0;
  double theta = 0.0;
  double n22[4] = {0, 0, 0, 0};
  double trace_vs_initial = 0.0, normalized_vs_initial = 0.0;
  double trace_vs_ideal = 0.0, normalized_vs_ideal = 0.0;
  double w_in_min = 0.0, w_out_min = 0.0, renorm_drift = 0.0;
  bool fringe_warning = false;
  std::vector<std::string> warnings;
  GridPtr w_in, w_out, w_ideal;
};

// Shared pipeline for cmd_transfer and each sweep point:
// (match) -> derive -> steady -> channel at t_transfer -> initial grid ->
// channel action -> overlap metrics.
TransferResult run_transfer_point(const RunConfig& cfg) {
  TransferResult r;
  r.used_params = cfg.physical;

  if (cfg.experiment.match_free_parameter != "none") {
    bm_physical_params matched{};
    check(bm_match_frequencies(&cfg.physical,
                               cfg.experiment.match_free_parameter.c_str(),
                               cfg.experiment.match_bracket_lo,
                               cfg.experiment.match_bracket_hi, &matched,
                               &r.match_residual),
          "match_frequencies");
    r.used_params = matched;
    r.matched = true;
  }

  check(bm_derive(&r.used_params, &r.derived), "derive");
  check(bm_steady_state_solve(&r.used_params, 0, 0, &r.steady), "steady_state");
  if (!r.steady.phase_shift_negligible)
    r.warnings.push_back(
        "steady-state phase shift is not negligible: |phi| = " +
        fmt(std::abs(r.steady.phi_rad_s)) + " rad/s vs delta_tilde = " +
        fmt(r.derived.delta_tilde_rad_s));

  if (r.derived.omega_st_rad_s == 0.0)
    throw NumericalError(BM_ERR_INVALID_ARGUMENT,
                         "state-transfer frequency is zero; no transfer");

  const double mismatch =
      std::abs(r.derived.omega_m_shifted_rad_s - r.derived.omega_2_shifted_rad_s);
  if (mismatch > 0.01 * std::abs(r.derived.omega_st_rad_s))
    r.warnings.push_back(
        "shifted frequencies mismatched beyond tolerance: |omega_m' - "
        "omega_2'| = " + fmt(mismatch) + " rad/s");

  r.d_eff = cfg.experiment.noise_enabled
                ? (cfg.experiment.noise_symmetrized ? 0.5 * r.derived.d_chi
                                                    : r.derived.d_chi)
                : 0.0;
  r.theta = r.derived.omega_st_rad_s * r.derived.t_transfer_s;

  double noise[16];
  check(bm_noise_covariance(r.derived.omega_st_rad_s, r.derived.xi_2_rad_s,
                            r.derived.xi_m_rad_s, r.d_eff,
                            r.derived.t_transfer_s, noise),
        "noise_covariance");
  r.n22[0] = noise[0];
  r.n22[1] = noise[1];
  r.n22[2] = noise[4];
  r.n22[3] = noise[5];

  bm_grid_spec spec;
  spec.x_min = spec.p_min = -cfg.experiment.grid_span;
  spec.x_max = spec.p_max = cfg.experiment.grid_span;
  spec.n_x = spec.n_p = cfg.experiment.grid_points;

  const double amp = cfg.experiment.initial_state == "thermal"
                         ? cfg.experiment.nbar
                         : cfg.experiment.alpha;
  bm_wigner_grid* raw = nullptr;
  check(bm_wigner_state(state_kind(cfg.experiment.initial_state), amp, &spec, &raw),
        "wigner_state");
  r.w_in.reset(raw);

  bm_wigner_grid* out = nullptr;
  check(bm_wigner_apply_channel(r.w_in.get(), r.theta, r.n22, &out),
        "apply_channel");
  r.w_out.reset(out);

  const double zero4[4] = {0, 0, 0, 0};
  bm_wigner_grid* ideal = nullptr;
  check(bm_wigner_apply_channel(r.w_in.get(), r.theta, zero4, &ideal),
        "apply_channel (noiseless reference)");
  r.w_ideal.reset(ideal);

  check(bm_wigner_overlap(r.w_out.get(), r.w_in.get(), &r.trace_vs_initial,
                          &r.normalized_vs_initial),
        "overlap vs initial");
  check(bm_wigner_overlap(r.w_out.get(), r.w_ideal.get(), &r.trace_vs_ideal,
                          &r.normalized_vs_ideal),
        "overlap vs ideal");

  int fringe = 0;
  double drift = 0.0;
  bm_wigner_flags(r.w_out.get(), &fringe, &drift);
  r.fringe_warning = fringe != 0;
  r.renorm_drift = drift;
  if (std::abs(drift) > 1e-6)
    r.warnings.push_back("convolution mass drift " + fmt(drift) +
                         " renormalized away (state leaks past the grid edge)");
  bm_wigner_min(r.w_in.get(), &r.w_in_min);
  bm_wigner_min(r.w_out.get(), &r.w_out_min);
  return r;
}

json fidelity_json(const RunConfig& cfg, const TransferResult& r) {
  json j;
  j["derived"] = derived_json(r.derived);
  j["steady"] = steady_json(r.steady);
  j["params"] = params_json(r.used_params);
  j["match"] = json{{"enabled", r.matched},
                    {"free_parameter", cfg.experiment.match_free_parameter},
                    {"residual_rad_s", r.match_residual}};
  const double ratio = r.n22[0] != 0.0 ? r.n22[3] / r.n22[0] : 0.0;
  const double xi_ratio = r.derived.xi_m_rad_s != 0.0
                              ? (r.derived.xi_2_rad_s / r.derived.xi_m_rad_s) *
                                    (r.derived.xi_2_rad_s / r.derived.xi_m_rad_s)
                              : 0.0;
  j["channel"] = json{
      {"theta_rad", r.theta},
      {"t_transfer_s", r.derived.t_transfer_s},
      {"omega_st_rad_s", r.derived.omega_st_rad_s},
      {"d_eff", r.d_eff},
      {"noise_enabled", cfg.experiment.noise_enabled},
      {"noise_symmetrized", cfg.experiment.noise_symmetrized},
      {"transfer_map", r.derived.omega_st_rad_s >= 0.0 ? "M" : "M_transpose"},
      {"n22", json::array({json::array({r.n22[0], r.n22[1]}),
                           json::array({r.n22[2], r.n22[3]})})},
      {"n22_pp_over_xx", ratio},
      {"xi_ratio_squared", xi_ratio}};
  j["grid"] = json{{"n", cfg.experiment.grid_points},
                   {"span", cfg.experiment.grid_span},
                   {"initial_state", cfg.experiment.initial_state},
                   {"alpha", cfg.experiment.alpha},
                   {"seed", cfg.experiment.seed}};
  j["overlap"] = json{
      {"vs_initial", json{{"trace", r.trace_vs_initial},
                          {"normalized", r.normalized_vs_initial}}},
      {"vs_ideal", json{{"trace", r.trace_vs_ideal},
                        {"normalized", r.normalized_vs_ideal}}}};
  j["wigner"] = json{{"w_in_min", r.w_in_min},
                     {"w_out_min", r.w_out_min},
                     {"renorm_drift", r.renorm_drift},
                     {"fringe_warning", r.fringe_warning}};
  j["warnings"] = r.warnings;
  return j;
}

void write_transfer_artifacts(const RunConfig& cfg, const TransferResult& r,
                              const fs::path& dir, bool write_grids) {
  write_json_file(fidelity_json(cfg, r), dir / "fidelity.json");
  if (!write_grids) return;
  check(bm_wigner_write_csv(r.w_in.get(), (dir / "W_in.csv").c_str()), "write W_in");
  check(bm_wigner_write_csv(r.w_out.get(), (dir / "W_out.csv").c_str()),
        "write W_out");
  check(bm_wigner_write_pgm(r.w_in.get(), (dir / "W_in.pgm").c_str()),
        "render W_in");
  check(bm_wigner_write_pgm(r.w_out.get(), (dir / "W_out.pgm").c_str()),
        "render W_out");
  check(bm_wigner_write_ppm(r.w_out.get(), (dir / "W_out.ppm").c_str()),
        "render W_out (color)");
}

// Wraps a command body with the exit-code policy.
int run_command(const CliOptions& opt, const std::string& name,
                auto&& body) {
  std::string out_dir = opt.out_dir;
  try {
    RunConfig cfg;
    if (name == "render") {
      if (!opt.input_path.empty()) cfg.output_dir = out_dir.empty() ? "out" : out_dir;
    } else {
      cfg = load_config(opt, name);
    }
    body(cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!out_dir.empty()) {
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (!ec) {
        json j{{"error", e.what()}, {"status", bm_status_name(e.status)}};
        std::ofstream f(fs::path(out_dir) / "error.json");
        if (f) f << j.dump(2) << '\n';
      }
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int cmd_derive(const CliOptions& opt) {
  return run_command(opt, "derive", [&](RunConfig& cfg) {
    bm_derived_params d{};
    check(bm_derive(&cfg.physical, &d), "derive");
    const fs::path dir = ensure_out_dir(cfg);
    write_json_file(derived_json(d), dir / "derived.json");
    std::cout << derived_json(d).dump(2) << '\n';
  });
}

int cmd_steady(const CliOptions& opt) {
  return run_command(opt, "steady", [&](RunConfig& cfg) {
    bm_steady_state s{};
    check(bm_steady_state_solve(&cfg.physical, 0, 0, &s), "steady_state");
    const fs::path dir = ensure_out_dir(cfg);
    write_json_file(steady_json(s), dir / "steady.json");
    std::cout << steady_json(s).dump(2) << '\n';
  });
}

int cmd_match(const CliOptions& opt) {
  return run_command(opt, "match", [&](RunConfig& cfg) {
    bm_physical_params matched{};
    double residual = 0.0;
    check(bm_match_frequencies(&cfg.physical,
                               cfg.experiment.match_free_parameter.c_str(),
                               cfg.experiment.match_bracket_lo,
                               cfg.experiment.match_bracket_hi, &matched,
                               &residual),
          "match_frequencies");
    bm_derived_params d{};
    check(bm_derive(&matched, &d), "derive");
    json j{{"free_parameter", cfg.experiment.match_free_parameter},
           {"residual_rad_s", residual},
           {"params", params_json(matched)},
           {"derived", derived_json(d)}};
    const fs::path dir = ensure_out_dir(cfg);
    write_json_file(j, dir / "match.json");
    std::cout << j.dump(2) << '\n';
  });
}

int cmd_transfer(const CliOptions& opt) {
  return run_command(opt, "transfer", [&](RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const TransferResult r = run_transfer_point(cfg);
    write_transfer_artifacts(cfg, r, dir, true);
    std::cout << "transfer complete: overlap vs ideal (trace) = "
              << fmt(r.trace_vs_ideal) << ", vs initial (trace) = "
              << fmt(r.trace_vs_initial) << '\n';
  });
}

int cmd_sweep(const CliOptions& opt) {
  return run_command(opt, "sweep", [&](RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const size_t n = cfg.sweep.values.size();
    std::vector<TransferResult> results(n);
    std::vector<std::string> errors(n);

    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          RunConfig point = cfg;
          apply_sweep_value(point, cfg.sweep.parameter, cfg.sweep.values[i]);
          results[i] = run_transfer_point(point);
          char sub[32];
          std::snprintf(sub, sizeof(sub), "point_%03zu", i);
          const fs::path pdir = dir / sub;
          fs::create_directories(pdir);
          RunConfig pcfg = point;
          write_transfer_artifacts(pcfg, results[i], pdir, false);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    };
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1 || n <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < std::min<size_t>(jobs, n); ++t)
        pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    for (size_t i = 0; i < n; ++i)
      if (!errors[i].empty())
        throw NumericalError(BM_ERR_INTERNAL, "sweep point " + std::to_string(i) +
                                                  " failed: " + errors[i]);

    auto row = [&](double value, const TransferResult& r, int refined) {
      std::string s;
      s += fmt(value);
      s += ',' + fmt(r.derived.omega_st_rad_s);
      s += ',' + fmt(r.derived.t_transfer_s);
      s += ',' + fmt(r.derived.xi_2_rad_s);
      s += ',' + fmt(r.derived.xi_m_rad_s);
      s += ',' + fmt(r.d_eff);
      s += ',' + fmt(r.n22[0]);
      s += ',' + fmt(r.n22[1]);
      s += ',' + fmt(r.n22[3]);
      s += ',' + fmt(r.trace_vs_initial);
      s += ',' + fmt(r.normalized_vs_initial);
      s += ',' + fmt(r.trace_vs_ideal);
      s += ',' + fmt(r.normalized_vs_ideal);
      s += ',';
      s += std::to_string(refined);
      return s;
    };

    std::string csv =
        "parameter,value,omega_st_rad_s,t_transfer_s,xi_2_rad_s,xi_m_rad_s,"
        "d_eff,n22_xx,n22_xp,n22_pp,trace_vs_initial,normalized_vs_initial,"
        "trace_vs_ideal,normalized_vs_ideal,refined\n";
    for (size_t i = 0; i < n; ++i)
      csv += cfg.sweep.parameter + ',' + row(cfg.sweep.values[i], results[i], 0) + '\n';

    if (cfg.sweep.optimize && n >= 2) {
      size_t best = 0;
      for (size_t i = 1; i < n; ++i)
        if (results[i].trace_vs_ideal > results[best].trace_vs_ideal) best = i;
      double lo = cfg.sweep.values[best == 0 ? 0 : best - 1];
      double hi = cfg.sweep.values[best + 1 < n ? best + 1 : best];
      double best_val = cfg.sweep.values[best];
      double best_fid = results[best].trace_vs_ideal;
      auto eval = [&](double v) {
        RunConfig point = cfg;
        apply_sweep_value(point, cfg.sweep.parameter, v);
        return run_transfer_point(point);
      };
      // golden-section maximization on [lo, hi]
      const double gr = 0.6180339887498949;
      double a = lo, b = hi;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      TransferResult r1 = eval(x1), r2 = eval(x2);
      for (int it = 0; it < 24; ++it) {
        if (r1.trace_vs_ideal < r2.trace_vs_ideal) {
          a = x1; x1 = x2; r1 = std::move(r2);
          x2 = a + gr * (b - a); r2 = eval(x2);
        } else {
          b = x2; x2 = x1; r2 = std::move(r1);
          x1 = b - gr * (b - a); r1 = eval(x1);
        }
      }
      const TransferResult& rb =
          r1.trace_vs_ideal >= r2.trace_vs_ideal ? r1 : r2;
      const double xb = r1.trace_vs_ideal >= r2.trace_vs_ideal ? x1 : x2;
      if (rb.trace_vs_ideal >= best_fid)
        csv += cfg.sweep.parameter + ',' + row(xb, rb, 1) + '\n';
      else
        csv += cfg.sweep.parameter + ',' + row(best_val, results[best], 1) + '\n';
    }

    std::ofstream f(dir / "sweep.csv", std::ios::binary);
    if (!f) throw ConfigError("cannot write sweep.csv");
    f << csv;
    std::cout << "sweep complete: " << n << " points -> "
              << (dir / "sweep.csv").string() << '\n';
  });
}

int cmd_spectrum(const CliOptions& opt) {
  return run_command(opt, "spectrum", [&](RunConfig& cfg) {
    double re[6], im[6];
    int stable = 0;
    check(bm_linearized_spectrum(&cfg.physical, re, im, &stable), "spectrum");
    json eigs = json::array();
    for (int i = 0; i < 6; ++i) eigs.push_back(json{{"re", re[i]}, {"im", im[i]}});
    json j{{"eigenvalues", eigs}, {"stable", stable != 0}};
    const fs::path dir = ensure_out_dir(cfg);
    write_json_file(j, dir / "spectrum.json");
    std::cout << j.dump(2) << '\n';

    if (cfg.full_model.t_end_s > 0.0) {
      double s0[6];
      check(bm_steady_full_state(&cfg.physical, s0), "steady state");
      s0[4] += 1.0;  // displaced mirror
      bm_timeseries* ts = nullptr;
      check(bm_full_model_integrate(&cfg.physical, s0, cfg.full_model.t_end_s,
                                    cfg.full_model.tol, cfg.full_model.samples,
                                    cfg.full_model.damping, &ts),
            "full model integration");
      const int rc = bm_timeseries_write_csv(ts, (dir / "full_model.csv").c_str());
      bm_timeseries_free(ts);
      check(rc, "write full_model.csv");
    }
  });
}

int cmd_oracle_check(const CliOptions& opt) {
  int exit_code = 0;
  const int rc = run_command(opt, "oracle-check", [&](RunConfig& cfg) {
    json opts{{"dim", cfg.oracle.dim},
              {"grid_points", cfg.oracle.grid_points},
              {"span", cfg.oracle.span},
              {"alpha", cfg.oracle.alpha},
              {"paths", cfg.oracle.paths},
              {"seed", cfg.oracle.seed},
              {"tolerance_scale", cfg.oracle.tolerance_scale}};
    char* report = nullptr;
    check(bm_oracle_check(opts.dump().c_str(), &report), "oracle_check");
    const json j = json::parse(report);
    bm_string_free(report);
    const fs::path dir = ensure_out_dir(cfg);
    write_json_file(j, dir / "oracle_report.json");
    std::cout << j.dump(2) << '\n';
    if (!j.value("all_passed", false)) exit_code = 2;
  });
  return rc != 0 ? rc : exit_code;
}

int cmd_render(const CliOptions& opt) {
  return run_command(opt, "render", [&](RunConfig& cfg) {
    if (opt.input_path.empty())
      throw ConfigError("render: --input CSV path is required");
    bm_wigner_grid* g = nullptr;
    check(bm_wigner_read_csv(opt.input_path.c_str(), &g), "read wigner csv");
    GridPtr grid(g);
    const fs::path dir = ensure_out_dir(cfg);
    const std::string stem = fs::path(opt.input_path).stem().string();
    check(bm_wigner_write_pgm(grid.get(), (dir / (stem + ".pgm")).c_str()),
          "write pgm");
    check(bm_wigner_write_ppm(grid.get(), (dir / (stem + ".ppm")).c_str()),
          "write ppm");
    std::cout << "rendered " << stem << ".pgm and " << stem << ".ppm\n";
  });
}

}  // namespace bmcli
