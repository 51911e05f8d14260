#pragma once

namespace casispec::constants {

// Exact SI defining constants. Never configurable.
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double c_light = 299792458.0;       // m/s

// omega[rad/s] = E[eV] * e / hbar
inline constexpr double ev_to_rad_per_s = 1.602176634e-19 / 1.054571817e-34;

}  // namespace casispec::constants
