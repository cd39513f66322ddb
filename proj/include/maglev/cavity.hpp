#pragma once

#include <utility>
#include <vector>

#include "maglev/magnet.hpp"

namespace maglev {

// Coaxial quarter-wave stub cavity.
struct CavityGeometry {
    double r_c = 5.0e-3;    // cavity inner radius, m
    double r_s = 2.0e-3;    // stub radius, m
    double h_s = 7.5e-3;    // stub height, m
    double depth = 12.5e-3; // total interior height, m
    double f0 = 10.04e9;    // bare resonance frequency, Hz

    double gap() const { return r_c - r_s; }
    void validate() const;
};

// Exponential frequency-shift model:
//   (f0^2 - f^2)/f0^2 = A * exp(-2 beta_ev z)
struct ShiftModel {
    double beta_ev = 430.0;  // evanescent decay constant, 1/m
    double A = 0.1;          // dimensionless shift amplitude
    double f0 = 10.04e9;     // Hz

    void validate() const;
};

// L0 = mu0 h_s ln(r_c/r_s) / (2 pi)
double coax_inductance(const CavityGeometry& geom);

// f = 1 / (2 pi sqrt(L C)); L, C > 0 required.
double resonant_frequency(double L, double C);

// beta_ev = sqrt(| (x01/r_c)^2 - (2 pi / lambda)^2 |), x01 = 2.405.
// Throws when the radicand sits within 1e-9 (relative) of cutoff.
double evanescent_constant(const CavityGeometry& geom, double lambda);

// Frequency of the shifted resonance at magnet height z (m).
double freq_shift_from_height(double z, const ShiftModel& model);

// Exact inverse of freq_shift_from_height; valid for 0 < f < f0.
double height_from_freq(double f, const ShiftModel& model);

// Levitation height from the force balance k_lev m^2 / z^4 = M g.
double force_balance_height(const MagnetSpec& magnet, double k_lev);

// Default point-dipole-over-image force coefficient, 3 mu0 / (32 pi).
double default_k_lev();

// Rows of (sqrt(B_r), -ln((f0^2-f^2)/f0^2)/(2 beta_ev)) generated by
// chaining the force-balance height and the shift model; a straight
// line on model data.
std::vector<std::pair<double, double>> calibration_check(
    const MagnetSpec& magnet_template, const std::vector<double>& br_values,
    const ShiftModel& model, double k_lev);

// Relative mode amplitude (max 1) at radius r and height z above the
// stub tip: exponential inside the stub radius, (1/r)cos(k0 r) outside,
// continuity-matched at r = r_s, with e^{-beta_ev z} axial decay.
double mode_profile(const CavityGeometry& geom, double r, double z);

}  // namespace maglev
