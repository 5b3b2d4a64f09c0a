#pragma once

#include <string>

#include "core/full_model.hpp"
#include "core/sde.hpp"
#include "core/wigner.hpp"

namespace becmirror {

/// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

/// Header "x,p,w", one row per node, x-major, round-trip exact floats.
void write_wigner_csv(const WignerGrid& g, const std::string& path);
WignerGrid read_wigner_csv(const std::string& path);

/// Compact JSON descriptor with a base-10 payload (values x-major).
void write_wigner_json(const WignerGrid& g, const std::string& path);
WignerGrid read_wigner_json(const std::string& path);

/// 8-bit grayscale heat map (binary P5), symmetric range around zero,
/// p increasing upward.
void write_wigner_pgm(const WignerGrid& g, const std::string& path);

/// Diverging color map (binary P6): blue negative, white zero, red positive.
void write_wigner_ppm(const WignerGrid& g, const std::string& path);

/// Columns t, mean_{x2,p2,xm,pm}, the 10 unique covariance entries
/// cov_{xx,xp,...}; floats with 17 significant digits.
void write_ensemble_csv(const SdeEnsemble& e, const std::string& path);

/// Columns t, re_a, im_a, x_2, p_2, x_m, p_m.
void write_timeseries_csv(const TimeSeries& ts, const std::string& path);

}  // namespace becmirror
