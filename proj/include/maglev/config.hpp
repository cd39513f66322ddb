#pragma once

#include <string>

#include "maglev/cavity.hpp"
#include "maglev/errors.hpp"
#include "maglev/levitation.hpp"
#include "maglev/magnet.hpp"
#include "maglev/sweeps.hpp"

namespace maglev {

struct OutputOptions {
    std::string directory = ".";
    std::string landscape_format = "both";  // csv | gnuplot | both
};

// SI-unit view handed to the library.
struct ResolvedConfig {
    MagnetSpec magnet;
    CavityGeometry cavity;
    ShiftModel shift;
    LevitationConfig levitation;
    ClassifierThresholds thresholds;
    double k_lev = 0.0;
    bool eq30_literal = false;
    OutputOptions output;
};

// User-facing configuration in mm / GHz / T / degrees, mirroring the plot
// axes of the source data. Every field is optional in the JSON file; the
// defaults reproduce the reference cavity and magnet. Unit conversion to SI
// happens exactly once, in resolve().
struct RunConfig {
    // magnet
    double magnet_radius_mm = 0.5;
    double magnet_thickness_mm = 0.5;  // full thickness
    double magnet_remanence_t = 1.44;
    std::string magnet_grade;  // empty = unset
    double magnet_density_kg_m3 = 7.4e3;
    double magnet_theta_deg = 0.0;

    // cavity
    double cavity_radius_mm = 5.0;
    double stub_radius_mm = 2.0;
    double stub_height_mm = 7.5;
    double cavity_depth_mm = 12.5;
    double f0_ghz = 10.04;

    // levitation
    std::string response_mode = "induced";  // induced | fixed_current
    double current_a = -1.0;                // < 0 = image-moment default
    double wall_distance_mm = 0.0;          // 0 = cavity radius
    double axial_response = 1.0e8;
    double transverse_response = 500.0;
    double calibration = 1.0;
    double saturation_ratio = 6.0;
    double radial_coupling = 3.0e-5;
    bool radial_polarization = false;

    // model
    double shift_amplitude = 0.1;
    double k_lev = 3.75e-8;  // overwritten by defaults() with the exact value
    double threshold_place_mhz = 50.0;
    double threshold_tilt_mhz = 30.0;
    double threshold_noise_mhz = 5.0;
    double threshold_upshift_mhz = 10.0;
    bool eq30_literal = false;

    OutputOptions output;

    static RunConfig defaults();

    // Parses a JSON document; unknown keys are rejected.
    static RunConfig from_json_text(const std::string& text);

    // Fully resolved user-unit JSON (what print-config emits).
    std::string to_json_text() const;

    ResolvedConfig resolve() const;
};

// Reads and parses a config file; an empty path yields the defaults.
RunConfig load_config(const std::string& path);

}  // namespace maglev
