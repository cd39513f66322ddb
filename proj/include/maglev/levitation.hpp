#pragma once

#include <iosfwd>
#include <vector>

#include "maglev/cavity.hpp"
#include "maglev/magnet.hpp"

namespace maglev {

// Radial/vertical coordinates of the magnet center relative to the stub
// axis and stub top surface, plus moment tilt from vertical.
struct Position {
    double x = 0.0;      // m, 0 <= x < r_c for levitation states
    double z = 0.0;      // m, > 0 for levitation states
    double theta = 0.0;  // rad
};

// How the superconducting response is modeled.
//   fixed_current: the response loop carries a prescribed current I and the
//     interaction energy is linear in the loop field (the classical two-loop
//     mutual energy).
//   induced: the loop current is set by the flux the magnet couples into the
//     rim loop (I = Phi / L_eff), making the interaction quadratic in the
//     per-amp loop field. This is the default used for equilibrium finding.
enum class ResponseMode { fixed_current, induced };

struct LevitationConfig {
    ResponseMode mode = ResponseMode::induced;

    // fixed_current mode: loop current in A; < 0 selects the image-moment
    // default m / (pi r_s^2).
    double current = -1.0;

    // radial coordinate of the cavity wall (m); <= 0 selects geom.r_c.
    double wall_distance = 0.0;

    // induced mode: energy per squared per-amp field for a moment-aligned
    // (axial) flux channel and the transverse channel, at the reference
    // moment. axial_response carries the single scalar calibration of the
    // response strength.
    double axial_response = 1.0e8;
    double transverse_response = 500.0;
    double calibration = 1.0;

    // critical-current cap on the induced response: the effective moment
    // saturates as m_c tanh(m/m_c) with m_c = saturation_ratio * m_ref.
    double saturation_ratio = 6.0;

    // radially polarized magnets couple weakly into the coaxial rim loop;
    // both response channels are scaled by this factor when
    // radial_polarization is set. Trend-level model.
    double radial_coupling = 3e-5;
    bool radial_polarization = false;
};

enum class StabilityLabel { stable_on_stub, falls_into_gap, no_levitated_minimum };

const char* to_string(StabilityLabel label);

struct EquilibriumResult {
    bool found = false;
    Position position{};
    double u_min = 0.0;
    StabilityLabel label = StabilityLabel::no_levitated_minimum;
    // Hessian-sign diagnostics at the minimum (eigenvalues of the numerical
    // Hessian; both positive for a true 2-D minimum).
    double hessian_eig_lo = 0.0;
    double hessian_eig_hi = 0.0;
    int candidates = 0;  // distinct refined minima examined
};

// Per-amp field of a coaxial circular loop of radius a lying in the z = 0
// plane, evaluated at radial distance r and height h.
struct RingField {
    double bz;    // T/A
    double brho;  // T/A
};
RingField loop_unit_field(double a, double r, double h);

// Interaction energy between magnet and response loop at the stub rim.
// fixed_current mode evaluates
//   U = mu0 I m / (2 pi sqrt((r_s+r)^2+h^2)) *
//       [ ((r_s^2-r^2-h^2)/((r_s-r)^2+h^2)) E(k) + K(k) ],
//   k^2 = 4 r_s r / ((r_s+r)^2+h^2), h = pos.z
// generalized to tilted moments via the field projection onto the moment.
// induced mode evaluates the flux-response energy (quadratic in the loop
// field, saturation-capped).
double two_loop_energy(const MagnetSpec& magnet, const CavityGeometry& geom,
                       const Position& pos, const LevitationConfig& cfg);

// Repulsive image energy from the cavity side wall:
//   U = mu0 m^2 (1 + sin^2 theta) / (64 pi (d - x)^3)
double mirror_energy(const MagnetSpec& magnet, const Position& pos,
                     const LevitationConfig& cfg);

// U = M g z
double gravitational_energy(const MagnetSpec& magnet, const Position& pos);

// Sum of the two superconductor terms and gravity.
double total_energy(const MagnetSpec& magnet, const CavityGeometry& geom,
                    const Position& pos, const LevitationConfig& cfg);

struct GridSpec {
    double x0 = 0.0, x1 = 0.0;  // m
    int nx = 0;
    double z0 = 0.0, z1 = 0.0;  // m
    int nz = 0;
};

struct EnergyLandscape {
    std::vector<double> xs;  // strictly increasing
    std::vector<double> zs;  // strictly increasing
    std::vector<double> u;   // row-major, u[ix * zs.size() + iz]; NaN = excluded
    int excluded = 0;

    double at(int ix, int iz) const { return u[static_cast<size_t>(ix) * zs.size() + iz]; }
};

// Total energy over a rectangular grid. Nodes within 10 um of the wall
// (x = d) or the floor (z = 0) are excluded and counted, not evaluated.
EnergyLandscape energy_landscape(const MagnetSpec& magnet, const CavityGeometry& geom,
                                 const LevitationConfig& cfg, const GridSpec& grid);

// One "x z U" triple per line, blank line between x-blocks.
void write_landscape_gnuplot(const EnergyLandscape& ls, std::ostream& out);
// CSV with header x_m,z_m,U_J.
void write_landscape_csv(const EnergyLandscape& ls, std::ostream& out);

struct FindOptions {
    int nx = 200;
    int nz = 200;
    double z_max = 45e-3;  // m; scan window height
};

// Local refinement only: coordinate descent with shrinking step from the
// given start, then a curvature-aware polish until the numerical gradient
// vanishes. Labels the refined point.
EquilibriumResult refine_equilibrium(const MagnetSpec& magnet, const CavityGeometry& geom,
                                     const LevitationConfig& cfg, const Position& start);

// All distinct refined minima of the landscape (coarse grid scan seeds,
// refinement, 50 um deduplication), sorted by energy.
std::vector<EquilibriumResult> refined_minima(const MagnetSpec& magnet,
                                              const CavityGeometry& geom,
                                              const LevitationConfig& cfg,
                                              const FindOptions& opts);

// Coarse grid scan followed by local refinement; returns the global
// minimum with its stability label, or no_levitated_minimum when the
// landscape is monotone.
EquilibriumResult find_equilibrium(const MagnetSpec& magnet, const CavityGeometry& geom,
                                   const LevitationConfig& cfg, const FindOptions& opts = {});

}  // namespace maglev
