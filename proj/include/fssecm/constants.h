#pragma once

#include <numbers>

namespace fssecm::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 299792458.0;            // m/s
inline constexpr double mu0 = 1.25663706212e-6;      // H/m
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double z0 = mu0 * c0;               // free-space wave impedance, ohm

} // namespace fssecm::constants

namespace fssecm::units {

inline constexpr double ghz = 1e9;
inline constexpr double mhz = 1e6;
inline constexpr double nh = 1e-9;
inline constexpr double pf = 1e-12;
inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;
inline constexpr double deg = std::numbers::pi / 180.0;

} // namespace fssecm::units
