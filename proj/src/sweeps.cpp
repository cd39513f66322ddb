#include "maglev/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

namespace {

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

std::string SweepResult::to_csv() const {
    std::string out = "param,x_min_m,z_min_m,U_min_J,label\n";
    for (size_t i = 0; i < values.size(); ++i) {
        const EquilibriumResult& r = rows[i];
        out += format_double("%.9g", values[i]);
        out += ',';
        if (r.found) {
            out += format_double("%.9e", r.position.x);
            out += ',';
            out += format_double("%.9e", r.position.z);
            out += ',';
            out += format_double("%.9e", r.u_min);
        } else {
            out += "nan,nan,nan";
        }
        out += ',';
        out += to_string(r.label);
        out += '\n';
    }
    return out;
}

SweepResult gap_sweep(const MagnetSpec& magnet, const CavityGeometry& base_geom,
                      const LevitationConfig& cfg, const std::vector<double>& gaps,
                      const FindOptions& opts) {
    SweepResult res;
    res.parameter = "gap_m";
    for (double gap : gaps) {
        if (!(gap > 0.0)) throw std::invalid_argument("gap_sweep: gap must be > 0");
        CavityGeometry geom = base_geom;
        geom.r_c = geom.r_s + gap;
        res.values.push_back(gap);
        res.rows.push_back(find_equilibrium(magnet, geom, cfg, opts));
    }
    return res;
}

SweepResult remanence_sweep(const MagnetSpec& magnet_template, const CavityGeometry& geom,
                            const LevitationConfig& cfg, const std::vector<double>& br_values,
                            Polarization polarization, const FindOptions& opts) {
    LevitationConfig c = cfg;
    c.radial_polarization = polarization == Polarization::radial;
    SweepResult res;
    res.parameter = "remanence_T";
    for (double br : br_values) {
        if (!(br >= 0.0)) throw std::invalid_argument("remanence_sweep: B_r must be >= 0");
        MagnetSpec m = magnet_template;
        m.remanence = br;
        m.grade.reset();
        res.values.push_back(br);
        res.rows.push_back(find_equilibrium(m, geom, c, opts));
    }
    return res;
}

SweepResult orientation_sweep(const MagnetSpec& magnet, const CavityGeometry& geom,
                              const LevitationConfig& cfg, const std::vector<double>& thetas,
                              const FindOptions& opts) {
    SweepResult res;
    res.parameter = "theta_rad";
    const EquilibriumResult* prev = nullptr;
    for (double theta : thetas) {
        if (!(theta >= 0.0 && theta <= 0.5 * PI + 1e-12))
            throw std::invalid_argument("orientation_sweep: theta must lie in [0, pi/2]");
        MagnetSpec m = magnet;
        m.theta = theta;
        EquilibriumResult r;
        if (prev && prev->found) {
            r = refine_equilibrium(m, geom, cfg,
                                   Position{prev->position.x, prev->position.z, 0.0});
        } else {
            r = find_equilibrium(m, geom, cfg, opts);
        }
        res.values.push_back(theta);
        res.rows.push_back(r);
        prev = &res.rows.back();
    }
    return res;
}

SweepResult size_sweep(const CavityGeometry& geom, const LevitationConfig& cfg,
                       const std::vector<double>& radii,
                       const std::vector<double>& thicknesses,
                       const FindOptions& opts) {
    if (radii.size() != thicknesses.size())
        throw std::invalid_argument("size_sweep: radii and thicknesses must pair up");
    SweepResult res;
    res.parameter = "radius_m";
    for (size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0 && thicknesses[i] > 0.0))
            throw std::invalid_argument("size_sweep: dimensions must be > 0");
        MagnetSpec m;
        m.radius = radii[i];
        m.half_thickness = 0.5 * thicknesses[i];
        m.remanence = 1.47;
        m.grade.reset();
        res.values.push_back(radii[i]);
        res.rows.push_back(find_equilibrium(m, geom, cfg, opts));
    }
    return res;
}

const char* to_string(PhenomenonLabel label) {
    switch (label) {
        case PhenomenonLabel::placed_on_stub: return "placed_on_stub";
        case PhenomenonLabel::lift_off: return "lift_off";
        case PhenomenonLabel::sliding_to_edge: return "sliding_to_edge";
        case PhenomenonLabel::tilt_on_surface: return "tilt_on_surface";
        case PhenomenonLabel::rotation: return "rotation";
        case PhenomenonLabel::fell_to_bottom: return "fell_to_bottom";
        case PhenomenonLabel::no_event: return "no_event";
    }
    return "unknown";
}

PhenomenonLabel classify_event(double f_bare, double f_before, double f_after,
                               EventContext context, bool in_contact,
                               const ClassifierThresholds& thr) {
    const double delta = f_after - f_before;
    if (std::fabs(delta) < thr.t_noise) return PhenomenonLabel::no_event;
    if (context == EventContext::on_bottom)
        return delta > thr.t_up ? PhenomenonLabel::fell_to_bottom : PhenomenonLabel::no_event;

    const double dev_before = f_before - f_bare;
    const double dev_after = f_after - f_bare;
    if (!in_contact && delta > thr.t_up && std::fabs(dev_after) < std::fabs(dev_before))
        return PhenomenonLabel::lift_off;
    if (dev_before > -thr.t_noise && dev_after <= -thr.t_place)
        return PhenomenonLabel::placed_on_stub;
    if (std::fabs(delta) >= thr.t_tilt) return PhenomenonLabel::sliding_to_edge;
    return PhenomenonLabel::tilt_on_surface;
}

PhenomenonLabel classify_series(double f_bare, const std::vector<double>& freqs,
                                EventContext context, bool in_contact,
                                const ClassifierThresholds& thr) {
    if (freqs.size() < 2) return PhenomenonLabel::no_event;
    const double first = freqs.front();
    const double last = freqs.back();
    const double lowest = *std::min_element(freqs.begin(), freqs.end());
    if (first - lowest >= thr.t_tilt && std::fabs(last - first) < thr.t_noise)
        return PhenomenonLabel::rotation;
    return classify_event(f_bare, first, last, context, in_contact, thr);
}

}  // namespace maglev
