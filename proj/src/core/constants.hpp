#pragma once

namespace becmirror {

// CODATA 2018
inline constexpr double k_hbar = 1.054571817e-34;        // J s
inline constexpr double k_speed_of_light = 299792458.0;  // m/s
inline constexpr double k_pi = 3.14159265358979323846;

}  // namespace becmirror
