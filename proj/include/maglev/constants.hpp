#pragma once

namespace maglev {

inline constexpr double PI = 3.14159265358979323846;
inline constexpr double MU0 = 4.0 * PI * 1e-7;        // T*m/A
inline constexpr double G_STD = 9.80665;              // m/s^2
inline constexpr double C_LIGHT = 299792458.0;        // m/s
inline constexpr double X01 = 2.405;                  // first zero of J0

// NdFeB bulk density, kg/m^3
inline constexpr double RHO_NDFEB = 7.4e3;

// thermal expansion of NdFeB over 0..100 C, 1/C (metadata only,
// not consumed by any computation here)
inline constexpr double NDFEB_EXPANSION_PARALLEL = 5.2e-6;
inline constexpr double NDFEB_EXPANSION_PERP = -0.8e-6;

}  // namespace maglev
