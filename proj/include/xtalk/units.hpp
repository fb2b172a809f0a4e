#pragma once

#include <numbers>

namespace xtalk::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values, SI.
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double vacuum_permittivity = 8.8541878128e-12;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;

inline constexpr double yb171_mass_amu = 170.936;

// Ordinary frequency <-> angular frequency. Every 2*pi in the code base goes
// through one of these.
constexpr double hz_to_angular(double hz) { return two_pi * hz; }
constexpr double khz_to_angular(double khz) { return two_pi * 1e3 * khz; }
constexpr double mhz_to_angular(double mhz) { return two_pi * 1e6 * mhz; }
constexpr double angular_to_hz(double w) { return w / two_pi; }
constexpr double angular_to_khz(double w) { return w / (two_pi * 1e3); }
constexpr double angular_to_mhz(double w) { return w / (two_pi * 1e6); }

constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }

}  // namespace xtalk::units
