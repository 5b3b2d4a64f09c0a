#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "becmirror.h"

namespace {

bm_physical_params reference() {
  bm_physical_params p{};
  p.mirror_mass_kg = 6e-12;
  p.mirror_omega_rad_s = 2 * 3.141592653589793 * 16e3;
  p.cavity_length_m = 195e-6;
  p.kappa_rad_s = 2.6e7;
  p.detuning_c_rad_s = 2.6e6;
  p.pump_rate_rad_s = 3.9 * 2.6e7;
  p.wavelength_m = 794.98e-9;
  p.atom_mass_kg = 1.4432e-25;
  p.atom_number = 25000;
  p.detuning_a_rad_s = -2 * 3.141592653589793 * 127e9;
  p.coupling_g_rad_s = 3.8e7;
  p.detuning_is_effective = 1;
  return p;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(bm_version()) == "0.1.0");
  CHECK(std::string(bm_status_name(BM_OK)) == "ok");
  CHECK(std::string(bm_status_name(BM_ERR_BRACKET)) == "bracketing error");
}

TEST_CASE("null arguments yield invalid-argument with a message") {
  CHECK(bm_derive(nullptr, nullptr) == BM_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(bm_last_error()) > 0);
}

TEST_CASE("derive through the C surface") {
  const bm_physical_params p = reference();
  bm_derived_params d{};
  REQUIRE(bm_derive(&p, &d) == BM_OK);
  CHECK(d.omega_2_rad_s == doctest::Approx(9.1290790402e4).epsilon(1e-9));
  CHECK(d.d_chi == doctest::Approx(900.0 / p.kappa_rad_s).epsilon(1e-12));

  bm_physical_params bad = p;
  bad.detuning_a_rad_s = 0.0;
  CHECK(bm_derive(&bad, &d) == BM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(bm_last_error()).find("detuning_a") != std::string::npos);
}

TEST_CASE("steady state and matching through the C surface") {
  bm_physical_params p = reference();
  bm_steady_state s{};
  REQUIRE(bm_steady_state_solve(&p, 0, 0, &s) == BM_OK);
  CHECK(s.residual < 1e-12 * p.kappa_rad_s);
  CHECK(s.n_cav > 0.0);

  bm_physical_params matched{};
  double residual = 0.0;
  REQUIRE(bm_match_frequencies(&p, "g", 6.2e3, 6.3e7, &matched, &residual) == BM_OK);
  CHECK(std::abs(residual) <= 1e-9 * p.mirror_omega_rad_s);
  CHECK(matched.coupling_g_rad_s == doctest::Approx(3.8003677e7).epsilon(1e-6));

  CHECK(bm_match_frequencies(&p, "g", 1.0, 2.0, &matched, &residual) ==
        BM_ERR_BRACKET);
  CHECK(std::string(bm_last_error()).find("sampled residuals") != std::string::npos);
  CHECK(bm_match_frequencies(&p, "finesse", 1.0, 2.0, &matched, &residual) ==
        BM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("channel matrices through the C surface") {
  double s[16], n[16];
  REQUIRE(bm_propagator(1.0, 0.5 * 3.141592653589793, s) == BM_OK);
  const double m[16] = {0, 0, 0, -1, 0, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, 0};
  for (int i = 0; i < 16; ++i) CHECK(std::abs(s[i] - m[i]) < 1e-15);

  REQUIRE(bm_noise_covariance(1.0, -0.5, 0.8, 0.4, 1.3, n) == BM_OK);
  CHECK(n[1] == doctest::Approx(n[4]).epsilon(1e-15));  // symmetric

  double mean[4] = {1, 0, 0, 0}, cov[16], mean_out[4], cov_out[16];
  for (int i = 0; i < 16; ++i) cov[i] = (i % 5 == 0) ? 1.0 : 0.0;
  REQUIRE(bm_apply_channel_moments(mean, cov, s, n, mean_out, cov_out) == BM_OK);
  CHECK(mean_out[3] == doctest::Approx(1.0).epsilon(1e-15));  // x_2 -> p_m row

  cov[0] = -2.0;
  CHECK(bm_apply_channel_moments(mean, cov, s, n, mean_out, cov_out) ==
        BM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("wigner grid lifecycle through the C surface") {
  namespace fs = std::filesystem;
  bm_grid_spec spec{-8.0, 8.0, 128, -8.0, 8.0, 128};
  bm_wigner_grid* cat = nullptr;
  REQUIRE(bm_wigner_state(3, 1.0, &spec, &cat) == BM_OK);

  double integral = 0.0;
  bm_wigner_integral(cat, &integral);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

  const double n22[4] = {0.2, 0.05, 0.05, 0.3};
  bm_wigner_grid* out = nullptr;
  REQUIRE(bm_wigner_apply_channel(cat, 0.5 * 3.141592653589793, n22, &out) == BM_OK);

  double tr = 0.0, nm = 0.0;
  REQUIRE(bm_wigner_overlap(out, cat, &tr, &nm) == BM_OK);
  CHECK(tr > 0.0);
  CHECK(nm > 0.0);
  CHECK(nm <= 1.0 + 1e-12);

  bm_grid_spec echo{};
  bm_wigner_spec(out, &echo);
  CHECK(echo.n_x == 128);
  const double* values = nullptr;
  REQUIRE(bm_wigner_values(out, &values) == BM_OK);
  CHECK(values != nullptr);

  const fs::path dir = fs::temp_directory_path() / "bm_capi_io";
  fs::create_directories(dir);
  const std::string csv = (dir / "w.csv").string();
  REQUIRE(bm_wigner_write_csv(out, csv.c_str()) == BM_OK);
  bm_wigner_grid* back = nullptr;
  REQUIRE(bm_wigner_read_csv(csv.c_str(), &back) == BM_OK);
  const double* v2 = nullptr;
  bm_wigner_values(back, &v2);
  double worst = 0.0;
  for (int k = 0; k < 128 * 128; ++k)
    worst = std::max(worst, std::abs(values[k] - v2[k]));
  CHECK(worst == 0.0);

  REQUIRE(bm_wigner_write_pgm(out, (dir / "w.pgm").string().c_str()) == BM_OK);
  REQUIRE(bm_wigner_write_ppm(out, (dir / "w.ppm").string().c_str()) == BM_OK);
  REQUIRE(bm_wigner_write_json(out, (dir / "w.json").string().c_str()) == BM_OK);

  int fringe = 0;
  double drift = 0.0;
  bm_wigner_flags(out, &fringe, &drift);
  CHECK(std::abs(drift) < 1e-6);

  bm_wigner_free(cat);
  bm_wigner_free(out);
  bm_wigner_free(back);

  CHECK(bm_wigner_state(9, 1.0, &spec, &cat) == BM_ERR_INVALID_ARGUMENT);
  CHECK(bm_wigner_read_csv((dir / "absent.csv").string().c_str(), &back) ==
        BM_ERR_IO);
}

TEST_CASE("sde through the C surface is deterministic") {
  const double s0[4] = {0, 0, 0, 0};
  bm_sde_result *a = nullptr, *b = nullptr;
  REQUIRE(bm_sde_run(1.0, -0.5, 0.8, 0.3, s0, 77, 1e-3, 1.0, 400, 1, &a) == BM_OK);
  REQUIRE(bm_sde_run(1.0, -0.5, 0.8, 0.3, s0, 77, 1e-3, 1.0, 400, 3, &b) == BM_OK);
  long long n = 0;
  bm_sde_sample_count(a, &n);
  REQUIRE(n > 0);
  double ta, tb, ma[4], mb[4], ca[16], cb[16];
  REQUIRE(bm_sde_ensemble_at(a, n - 1, &ta, ma, ca) == BM_OK);
  REQUIRE(bm_sde_ensemble_at(b, n - 1, &tb, mb, cb) == BM_OK);
  CHECK(ta == tb);
  CHECK(std::memcmp(ma, mb, sizeof ma) == 0);
  CHECK(std::memcmp(ca, cb, sizeof ca) == 0);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bm_capi_io";
  fs::create_directories(dir);
  REQUIRE(bm_sde_write_csv(a, (dir / "ens.csv").string().c_str()) == BM_OK);
  bm_sde_free(a);
  bm_sde_free(b);

  CHECK(bm_sde_run(1.0, 0.1, 0.1, 0.1, s0, 1, 1.0, 1.0, 4, 1, &a) ==
        BM_ERR_INVALID_ARGUMENT);  // dt too large
}

TEST_CASE("full model and spectrum through the C surface") {
  const bm_physical_params p = reference();
  double s0[6];
  REQUIRE(bm_steady_full_state(&p, s0) == BM_OK);
  s0[4] += 1.0;
  bm_timeseries* ts = nullptr;
  REQUIRE(bm_full_model_integrate(&p, s0, 2e-6, 1e-9, 16, 0.0, &ts) == BM_OK);
  long long rows = 0;
  bm_timeseries_count(ts, &rows);
  CHECK(rows == 17);
  double t = 0.0, y[6];
  REQUIRE(bm_timeseries_row(ts, rows - 1, &t, y) == BM_OK);
  CHECK(t == doctest::Approx(2e-6).epsilon(1e-12));
  bm_timeseries_free(ts);

  double re[6], im[6];
  int stable = 0;
  REQUIRE(bm_linearized_spectrum(&p, re, im, &stable) == BM_OK);
  double max_im = 0.0;
  for (int i = 0; i < 6; ++i) max_im = std::max(max_im, std::abs(im[i]));
  CHECK(max_im > 1e6);  // cavity branch present
}

TEST_CASE("oracle check through the C surface") {
  char* report = nullptr;
  const char* fast =
      "{\"dim\": 18, \"grid_points\": 96, \"span\": 6.0, \"alpha\": 1.0, "
      "\"paths\": 400}";
  REQUIRE(bm_oracle_check(fast, &report) == BM_OK);
  std::string s(report);
  bm_string_free(report);
  CHECK(s.find("\"all_passed\":true") != std::string::npos);

  const char* corrupted =
      "{\"dim\": 18, \"grid_points\": 96, \"span\": 6.0, \"alpha\": 1.0, "
      "\"paths\": 400, \"tolerance_scale\": 1e-9}";
  REQUIRE(bm_oracle_check(corrupted, &report) == BM_OK);
  s = report;
  bm_string_free(report);
  CHECK(s.find("\"all_passed\":false") != std::string::npos);

  const char* too_big = "{\"dim\": 50}";
  CHECK(bm_oracle_check(too_big, &report) == BM_ERR_SIZE_LIMIT);
}
