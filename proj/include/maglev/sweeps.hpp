#pragma once

#include <string>
#include <vector>

#include "maglev/levitation.hpp"

namespace maglev {

// Tabulated equilibria versus a swept parameter.
struct SweepResult {
    std::string parameter;
    std::vector<double> values;              // in the parameter's natural unit
    std::vector<EquilibriumResult> rows;     // one per value, same order

    // CSV with header param,x_min_m,z_min_m,U_min_J,label
    std::string to_csv() const;
};

enum class Polarization { axial, radial };

// Equilibrium per gap value; r_s fixed, r_c = r_s + gap.
SweepResult gap_sweep(const MagnetSpec& magnet, const CavityGeometry& base_geom,
                      const LevitationConfig& cfg, const std::vector<double>& gaps,
                      const FindOptions& opts = {});

// Equilibrium per remanence value.
SweepResult remanence_sweep(const MagnetSpec& magnet_template, const CavityGeometry& geom,
                            const LevitationConfig& cfg, const std::vector<double>& br_values,
                            Polarization polarization, const FindOptions& opts = {});

// Equilibrium per tilt angle. The first angle is solved by a full scan;
// each later angle is refined from the previous equilibrium, tracking the
// state of an already levitating magnet as it tilts.
SweepResult orientation_sweep(const MagnetSpec& magnet, const CavityGeometry& geom,
                              const LevitationConfig& cfg, const std::vector<double>& thetas,
                              const FindOptions& opts = {});

// Equilibrium per (radius, thickness) pair at fixed remanence 1.47 T.
SweepResult size_sweep(const CavityGeometry& geom, const LevitationConfig& cfg,
                       const std::vector<double>& radii,
                       const std::vector<double>& thicknesses,
                       const FindOptions& opts = {});

enum class PhenomenonLabel {
    placed_on_stub,
    lift_off,
    sliding_to_edge,
    tilt_on_surface,
    rotation,
    fell_to_bottom,
    no_event,
};

const char* to_string(PhenomenonLabel label);

enum class EventContext { on_stub, on_bottom };

struct ClassifierThresholds {
    double t_place = 50e6;  // Hz; minimum downshift from bare for a placed magnet
    double t_tilt = 30e6;   // Hz; split between sliding and tilting in contact
    double t_noise = 5e6;   // Hz; dead band
    double t_up = 10e6;     // Hz; minimum upshift for lift-off / fall detection
};

// Deterministic rule cascade over a before/after frequency pair.
// in_contact marks the magnet as mechanically held on the surface, which
// reads an upshift as a contact-state change instead of lift-off.
PhenomenonLabel classify_event(double f_bare, double f_before, double f_after,
                               EventContext context, bool in_contact = false,
                               const ClassifierThresholds& thr = {});

// Classification over a frequency time series; detects the double-well
// signature of a rotating magnet (dip and return), which a single
// before/after pair never reports.
PhenomenonLabel classify_series(double f_bare, const std::vector<double>& freqs,
                                EventContext context, bool in_contact = false,
                                const ClassifierThresholds& thr = {});

}  // namespace maglev
