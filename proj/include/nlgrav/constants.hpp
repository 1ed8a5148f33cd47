#pragma once

#include <numbers>

namespace nlgrav::constants {

// CODATA 2018. hbar, c and the elementary charge are exact by SI definition.
inline constexpr double hbar_si = 1.054571817e-34;       // J s
inline constexpr double g_si = 6.67430e-11;              // m^3 kg^-1 s^-2
inline constexpr double c_si = 299792458.0;              // m s^-1
inline constexpr double joule_per_ev = 1.602176634e-19;  // J / eV
inline constexpr double hbar_c_ev_m = hbar_si * c_si / joule_per_ev;

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt_pi = 1.7724538509055160273;
inline constexpr double sqrt_2_over_pi = 0.79788456080286535588;

inline constexpr const char* source = "CODATA 2018";

}  // namespace nlgrav::constants
