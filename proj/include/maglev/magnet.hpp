#pragma once

#include <optional>
#include <string>

namespace maglev {

// Cylindrical permanent magnet, axially magnetized unless tilted.
// theta is the angle between the magnetization axis and the stub
// surface normal (radians).
struct MagnetSpec {
    double radius = 0.5e-3;        // R, m
    double half_thickness = 0.25e-3;  // b, m (full thickness 2b)
    double remanence = 1.44;       // B_r, T
    double density = 7.4e3;        // kg/m^3
    double theta = 0.0;            // rad
    std::optional<std::string> grade;

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

// Tabulated remanence for neodymium grades N35..N54.
// Unknown grade -> std::out_of_range naming the label.
double grade_remanence(const std::string& grade);

// M = 2 pi R^2 b rho
double mass(const MagnetSpec& spec);

// m = B_r * (pi R^2 * 2b) / mu0
double dipole_moment(const MagnetSpec& spec);

// On-axis field of the uniformly magnetized disc at height Z from the
// magnet center:
//   B_z = (B_r/2) [ (Z+b)/sqrt(R^2+(Z+b)^2) - (Z-b)/sqrt(R^2+(Z-b)^2) ]
double axial_field(const MagnetSpec& spec, double Z);

}  // namespace maglev
