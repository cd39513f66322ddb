#include "maglev/magnet.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "maglev/constants.hpp"

namespace maglev {

namespace {

constexpr std::array<std::pair<const char*, double>, 9> kGradeTable{{
    {"N35", 1.22},
    {"N38", 1.26},
    {"N40", 1.29},
    {"N42", 1.32},
    {"N45", 1.37},
    {"N48", 1.42},
    {"N50", 1.44},
    {"N52", 1.47},
    {"N54", 1.50},
}};

}  // namespace

void MagnetSpec::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("magnet radius must be > 0");
    if (!(half_thickness > 0.0)) throw std::invalid_argument("magnet half thickness must be > 0");
    if (!(density > 0.0)) throw std::invalid_argument("magnet density must be > 0");
    if (!(remanence >= 0.0)) throw std::invalid_argument("remanence must be >= 0");
    if (!(theta >= 0.0 && theta <= PI)) throw std::invalid_argument("theta must lie in [0, pi]");
    if (grade && grade_remanence(*grade) != remanence)
        throw std::invalid_argument("remanence does not match grade " + *grade);
}

double grade_remanence(const std::string& grade) {
    for (const auto& [name, br] : kGradeTable)
        if (grade == name) return br;
    throw std::out_of_range("unknown grade: " + grade);
}

double mass(const MagnetSpec& spec) {
    return 2.0 * PI * spec.radius * spec.radius * spec.half_thickness * spec.density;
}

double dipole_moment(const MagnetSpec& spec) {
    return spec.remanence * PI * spec.radius * spec.radius * 2.0 * spec.half_thickness / MU0;
}

double axial_field(const MagnetSpec& spec, double Z) {
    const double R2 = spec.radius * spec.radius;
    const double zp = Z + spec.half_thickness;
    const double zm = Z - spec.half_thickness;
    return 0.5 * spec.remanence *
           (zp / std::sqrt(R2 + zp * zp) - zm / std::sqrt(R2 + zm * zm));
}

}  // namespace maglev
