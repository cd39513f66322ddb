#include "maglev/cavity.hpp"

#include <cmath>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

void CavityGeometry::validate() const {
    if (!(r_s > 0.0 && r_c > r_s))
        throw std::invalid_argument("cavity requires 0 < r_s < r_c");
    if (!(h_s > 0.0 && h_s < depth))
        throw std::invalid_argument("cavity requires 0 < h_s < depth");
    if (!(f0 > 0.0)) throw std::invalid_argument("cavity requires f0 > 0");
}

void ShiftModel::validate() const {
    if (!(beta_ev > 0.0)) throw std::invalid_argument("shift model requires beta_ev > 0");
    if (!(A > 0.0)) throw std::invalid_argument("shift model requires A > 0");
    if (!(f0 > 0.0)) throw std::invalid_argument("shift model requires f0 > 0");
}

double coax_inductance(const CavityGeometry& geom) {
    return MU0 * geom.h_s * std::log(geom.r_c / geom.r_s) / (2.0 * PI);
}

double resonant_frequency(double L, double C) {
    if (!(L > 0.0) || !(C > 0.0))
        throw std::domain_error("resonant_frequency requires L > 0 and C > 0");
    return 1.0 / (2.0 * PI * std::sqrt(L * C));
}

double evanescent_constant(const CavityGeometry& geom, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("wavelength must be > 0");
    const double t_cut = X01 / geom.r_c;
    const double t_wave = 2.0 * PI / lambda;
    const double diff = t_cut * t_cut - t_wave * t_wave;
    const double scale = std::max(t_cut * t_cut, t_wave * t_wave);
    if (std::fabs(diff) < 1e-9 * scale)
        throw std::domain_error("evanescent_constant: at cutoff");
    return std::sqrt(std::fabs(diff));
}

double freq_shift_from_height(double z, const ShiftModel& model) {
    if (!(z >= 0.0)) throw std::domain_error("height must be >= 0");
    const double ratio = model.A * std::exp(-2.0 * model.beta_ev * z);
    if (ratio >= 1.0)
        throw std::domain_error("freq_shift_from_height: shift amplitude implies f^2 <= 0");
    return model.f0 * std::sqrt(1.0 - ratio);
}

double height_from_freq(double f, const ShiftModel& model) {
    if (!(f > 0.0)) throw std::domain_error("frequency must be > 0");
    if (f >= model.f0) throw std::domain_error("no levitation solution: f >= f0");
    const double ratio = (model.f0 * model.f0 - f * f) / (model.f0 * model.f0);
    return -std::log(ratio / model.A) / (2.0 * model.beta_ev);
}

double force_balance_height(const MagnetSpec& magnet, double k_lev) {
    if (!(k_lev > 0.0)) throw std::domain_error("k_lev must be > 0");
    const double m = dipole_moment(magnet);
    if (m == 0.0) throw std::domain_error("no levitation: zero dipole moment");
    const double Mg = mass(magnet) * G_STD;
    return std::pow(k_lev * m * m / Mg, 0.25);
}

double default_k_lev() { return 3.0 * MU0 / (32.0 * PI); }

std::vector<std::pair<double, double>> calibration_check(
    const MagnetSpec& magnet_template, const std::vector<double>& br_values,
    const ShiftModel& model, double k_lev) {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(br_values.size());
    for (double br : br_values) {
        if (!(br > 0.0)) throw std::domain_error("calibration_check requires B_r > 0");
        MagnetSpec m = magnet_template;
        m.remanence = br;
        const double z = force_balance_height(m, k_lev);
        const double f = freq_shift_from_height(z, model);
        const double ratio = (model.f0 * model.f0 - f * f) / (model.f0 * model.f0);
        rows.emplace_back(std::sqrt(br), -std::log(ratio) / (2.0 * model.beta_ev));
    }
    return rows;
}

double mode_profile(const CavityGeometry& geom, double r, double z) {
    if (!(r >= 0.0 && r <= geom.r_c))
        throw std::domain_error("mode_profile: r outside [0, r_c]");
    if (!(z >= 0.0)) throw std::domain_error("mode_profile: z must be >= 0");
    const double lambda = C_LIGHT / geom.f0;
    const double beta = evanescent_constant(geom, lambda);
    const double k0 = 2.0 * PI / lambda;
    const double rim = std::cos(k0 * geom.r_s) / geom.r_s;
    double radial;
    if (r >= geom.r_s) {
        radial = std::cos(k0 * r) / r;
    } else {
        // amplitude pinned by continuity at the stub rim
        radial = rim * std::exp(beta * (r - geom.r_s));
    }
    return radial / rim * std::exp(-beta * z);
}

}  // namespace maglev
