#pragma once

#include <numbers>

// CODATA 2018 exact / recommended values, SI units.
namespace cavitrap::constants {

inline constexpr double elementary_charge = 1.602176634e-19;     // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double speed_of_light = 299792458.0;            // m/s
inline constexpr double boltzmann = 1.380649e-23;                // J/K
inline constexpr double planck = 6.62607015e-34;                 // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double atomic_mass_unit = 1.66053906660e-27;    // kg

/// e^2 / (4 pi eps0), J m.
inline constexpr double coulomb_constant =
    elementary_charge * elementary_charge /
    (4.0 * std::numbers::pi * vacuum_permittivity);

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace cavitrap::constants
