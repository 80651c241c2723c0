#pragma once

#include <numbers>

namespace holeburn::constants {

// CODATA 2018 exact values.
inline constexpr double planck = 6.62607015e-34;     // J s
inline constexpr double speed_of_light = 299792458.0; // m/s

inline constexpr double pi = std::numbers::pi;

// Unit helpers, everything else in the library is SI.
inline constexpr double micro = 1e-6;
inline constexpr double milli = 1e-3;
inline constexpr double mega = 1e6;
inline constexpr double tera = 1e12;
inline constexpr double cm2 = 1e-4; // m^2 per cm^2

} // namespace holeburn::constants
