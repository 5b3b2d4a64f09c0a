#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace becmirror {

struct OracleOptions {
  int dim = 30;            // Fock truncation (capped at 40)
  int grid_points = 256;
  double span = 8.0;
  double alpha = 2.0;
  long long paths = 2000;  // SDE ensemble size
  uint64_t seed = 2024;
  double tolerance_scale = 1.0;  // test hook; < 1 tightens all tolerances
};

struct OracleCheck {
  std::string name;
  double measured = 0.0;   // residual or deviation, check-specific
  double tolerance = 0.0;
  bool passed = false;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  bool all_passed = false;
};

/// Runs the cross-module consistency suite at the configured sizes:
/// symplectic algebra, closed-form noise vs quadrature, Fock beamsplitter vs
/// Gaussian channel (moments and Wigner grids), SDE ensemble vs closed form,
/// analytic cat vs Fock reconstruction.
OracleReport oracle_check(const OracleOptions& opts);

}  // namespace becmirror
