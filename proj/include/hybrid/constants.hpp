#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace hybrid::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double electron_mass = 9.1093837015e-31;     // kg
inline constexpr double proton_mass = 1.67262192369e-27;      // kg
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double boltzmann = 1.380649e-23;             // J/K (exact)
inline constexpr double epsilon0 = 8.8541878128e-12;          // F/m

inline constexpr double electron_volt = elementary_charge;  // J per eV

}  // namespace hybrid::constants

namespace hybrid {

// Library-internal frequencies are angular; these sit at the I/O boundary.
inline constexpr double hz_to_rad(double f_hz) { return constants::two_pi * f_hz; }
inline constexpr double rad_to_hz(double w) { return w / constants::two_pi; }
inline constexpr double ev_to_joule(double e_ev) { return e_ev * constants::electron_volt; }
inline constexpr double joule_to_ev(double e_j) { return e_j / constants::electron_volt; }

}  // namespace hybrid
