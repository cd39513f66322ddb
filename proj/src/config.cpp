#include "maglev/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "maglev/constants.hpp"

namespace maglev {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& name) {
    if (!j.is_object())
        throw ConfigError("config: section '" + name + "' must be an object");
}

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key '" +
                              (section.empty() ? it.key() : section + "." + it.key()) + "'");
}

double get_num(const json& obj, const std::string& section, const char* key,
               double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("config: " + section + "." + key + " must be a number");
    return v.get<double>();
}

bool get_bool(const json& obj, const std::string& section, const char* key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError("config: " + section + "." + key + " must be a boolean");
    return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& section, const char* key,
                    const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError("config: " + section + "." + key + " must be a string");
    return v.get<std::string>();
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.k_lev = default_k_lev();
    return c;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }
    require_object(root, "(root)");
    reject_unknown(root, "", {"magnet", "cavity", "levitation", "model", "output"});

    RunConfig c = defaults();

    if (root.contains("magnet")) {
        const json& m = root.at("magnet");
        require_object(m, "magnet");
        reject_unknown(m, "magnet",
                       {"radius_mm", "thickness_mm", "remanence_t", "grade",
                        "density_kg_m3", "theta_deg"});
        c.magnet_radius_mm = get_num(m, "magnet", "radius_mm", c.magnet_radius_mm);
        c.magnet_thickness_mm = get_num(m, "magnet", "thickness_mm", c.magnet_thickness_mm);
        c.magnet_density_kg_m3 = get_num(m, "magnet", "density_kg_m3", c.magnet_density_kg_m3);
        c.magnet_theta_deg = get_num(m, "magnet", "theta_deg", c.magnet_theta_deg);
        if (m.contains("grade") && !m.at("grade").is_null()) {
            c.magnet_grade = get_str(m, "magnet", "grade", "");
            try {
                c.magnet_remanence_t = grade_remanence(c.magnet_grade);
            } catch (const std::out_of_range& e) {
                throw ConfigError(std::string("config: magnet.grade: ") + e.what());
            }
        }
        c.magnet_remanence_t = get_num(m, "magnet", "remanence_t", c.magnet_remanence_t);
    }

    if (root.contains("cavity")) {
        const json& v = root.at("cavity");
        require_object(v, "cavity");
        reject_unknown(v, "cavity",
                       {"cavity_radius_mm", "stub_radius_mm", "stub_height_mm",
                        "cavity_depth_mm", "f0_ghz"});
        c.cavity_radius_mm = get_num(v, "cavity", "cavity_radius_mm", c.cavity_radius_mm);
        c.stub_radius_mm = get_num(v, "cavity", "stub_radius_mm", c.stub_radius_mm);
        c.stub_height_mm = get_num(v, "cavity", "stub_height_mm", c.stub_height_mm);
        c.cavity_depth_mm = get_num(v, "cavity", "cavity_depth_mm", c.cavity_depth_mm);
        c.f0_ghz = get_num(v, "cavity", "f0_ghz", c.f0_ghz);
    }

    if (root.contains("levitation")) {
        const json& v = root.at("levitation");
        require_object(v, "levitation");
        reject_unknown(v, "levitation",
                       {"mode", "current_a", "wall_distance_mm", "axial_response",
                        "transverse_response", "calibration", "saturation_ratio",
                        "radial_coupling", "radial_polarization"});
        c.response_mode = get_str(v, "levitation", "mode", c.response_mode);
        if (v.contains("current_a") && !v.at("current_a").is_null()) {
            c.current_a = get_num(v, "levitation", "current_a", c.current_a);
            if (!(c.current_a > 0.0))
                throw ConfigError("config: levitation.current_a must be positive");
        }
        c.wall_distance_mm = get_num(v, "levitation", "wall_distance_mm", c.wall_distance_mm);
        c.axial_response = get_num(v, "levitation", "axial_response", c.axial_response);
        c.transverse_response =
            get_num(v, "levitation", "transverse_response", c.transverse_response);
        c.calibration = get_num(v, "levitation", "calibration", c.calibration);
        c.saturation_ratio = get_num(v, "levitation", "saturation_ratio", c.saturation_ratio);
        c.radial_coupling = get_num(v, "levitation", "radial_coupling", c.radial_coupling);
        c.radial_polarization =
            get_bool(v, "levitation", "radial_polarization", c.radial_polarization);
    }

    if (root.contains("model")) {
        const json& v = root.at("model");
        require_object(v, "model");
        reject_unknown(v, "model",
                       {"shift_amplitude", "k_lev", "thresholds_mhz", "eq30_literal",
                        "eq30-literal"});
        c.shift_amplitude = get_num(v, "model", "shift_amplitude", c.shift_amplitude);
        c.k_lev = get_num(v, "model", "k_lev", c.k_lev);
        c.eq30_literal = get_bool(v, "model", "eq30_literal", c.eq30_literal);
        // hyphenated alias kept for config compatibility
        c.eq30_literal = get_bool(v, "model", "eq30-literal", c.eq30_literal);
        if (v.contains("thresholds_mhz")) {
            const json& t = v.at("thresholds_mhz");
            require_object(t, "model.thresholds_mhz");
            reject_unknown(t, "model.thresholds_mhz",
                           {"placement", "tilt", "noise", "upshift"});
            c.threshold_place_mhz =
                get_num(t, "model.thresholds_mhz", "placement", c.threshold_place_mhz);
            c.threshold_tilt_mhz =
                get_num(t, "model.thresholds_mhz", "tilt", c.threshold_tilt_mhz);
            c.threshold_noise_mhz =
                get_num(t, "model.thresholds_mhz", "noise", c.threshold_noise_mhz);
            c.threshold_upshift_mhz =
                get_num(t, "model.thresholds_mhz", "upshift", c.threshold_upshift_mhz);
        }
    }

    if (root.contains("output")) {
        const json& v = root.at("output");
        require_object(v, "output");
        reject_unknown(v, "output", {"directory", "landscape_format"});
        c.output.directory = get_str(v, "output", "directory", c.output.directory);
        c.output.landscape_format =
            get_str(v, "output", "landscape_format", c.output.landscape_format);
    }

    return c;
}

std::string RunConfig::to_json_text() const {
    json root;
    json m;
    m["radius_mm"] = magnet_radius_mm;
    m["thickness_mm"] = magnet_thickness_mm;
    m["remanence_t"] = magnet_remanence_t;
    if (magnet_grade.empty()) m["grade"] = nullptr;
    else m["grade"] = magnet_grade;
    m["density_kg_m3"] = magnet_density_kg_m3;
    m["theta_deg"] = magnet_theta_deg;
    root["magnet"] = m;

    json v;
    v["cavity_radius_mm"] = cavity_radius_mm;
    v["stub_radius_mm"] = stub_radius_mm;
    v["stub_height_mm"] = stub_height_mm;
    v["cavity_depth_mm"] = cavity_depth_mm;
    v["f0_ghz"] = f0_ghz;
    root["cavity"] = v;

    json l;
    l["mode"] = response_mode;
    if (current_a > 0.0) l["current_a"] = current_a;
    else l["current_a"] = nullptr;
    l["wall_distance_mm"] = wall_distance_mm;
    l["axial_response"] = axial_response;
    l["transverse_response"] = transverse_response;
    l["calibration"] = calibration;
    l["saturation_ratio"] = saturation_ratio;
    l["radial_coupling"] = radial_coupling;
    l["radial_polarization"] = radial_polarization;
    root["levitation"] = l;

    json mo;
    mo["shift_amplitude"] = shift_amplitude;
    mo["k_lev"] = k_lev;
    json t;
    t["placement"] = threshold_place_mhz;
    t["tilt"] = threshold_tilt_mhz;
    t["noise"] = threshold_noise_mhz;
    t["upshift"] = threshold_upshift_mhz;
    mo["thresholds_mhz"] = t;
    mo["eq30_literal"] = eq30_literal;
    root["model"] = mo;

    json o;
    o["directory"] = output.directory;
    o["landscape_format"] = output.landscape_format;
    root["output"] = o;

    return root.dump(2) + "\n";
}

ResolvedConfig RunConfig::resolve() const {
    ResolvedConfig r;

    r.magnet.radius = magnet_radius_mm * 1e-3;
    r.magnet.half_thickness = 0.5 * magnet_thickness_mm * 1e-3;
    r.magnet.remanence = magnet_remanence_t;
    r.magnet.density = magnet_density_kg_m3;
    r.magnet.theta = magnet_theta_deg * PI / 180.0;
    if (!magnet_grade.empty()) r.magnet.grade = magnet_grade;

    r.cavity.r_c = cavity_radius_mm * 1e-3;
    r.cavity.r_s = stub_radius_mm * 1e-3;
    r.cavity.h_s = stub_height_mm * 1e-3;
    r.cavity.depth = cavity_depth_mm * 1e-3;
    r.cavity.f0 = f0_ghz * 1e9;

    try {
        r.magnet.validate();
        r.cavity.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    r.shift.A = shift_amplitude;
    r.shift.f0 = r.cavity.f0;
    r.shift.beta_ev = evanescent_constant(r.cavity, C_LIGHT / r.cavity.f0);
    try {
        r.shift.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (response_mode == "induced") r.levitation.mode = ResponseMode::induced;
    else if (response_mode == "fixed_current") r.levitation.mode = ResponseMode::fixed_current;
    else
        throw ConfigError("config: levitation.mode must be induced or fixed_current");
    r.levitation.current = current_a;
    r.levitation.wall_distance = wall_distance_mm * 1e-3;
    if (r.levitation.wall_distance > 0.0 && r.levitation.wall_distance > r.cavity.r_c)
        throw ConfigError("config: levitation.wall_distance_mm exceeds the cavity radius");
    r.levitation.axial_response = axial_response;
    r.levitation.transverse_response = transverse_response;
    r.levitation.calibration = calibration;
    r.levitation.saturation_ratio = saturation_ratio;
    r.levitation.radial_coupling = radial_coupling;
    r.levitation.radial_polarization = radial_polarization;
    if (!(r.levitation.axial_response >= 0.0) || !(r.levitation.transverse_response >= 0.0))
        throw ConfigError("config: levitation responses must be nonnegative");
    if (!(r.levitation.calibration > 0.0))
        throw ConfigError("config: levitation.calibration must be positive");
    if (!(r.levitation.saturation_ratio > 0.0))
        throw ConfigError("config: levitation.saturation_ratio must be positive");
    if (!(r.levitation.radial_coupling > 0.0))
        throw ConfigError("config: levitation.radial_coupling must be positive");

    r.thresholds.t_place = threshold_place_mhz * 1e6;
    r.thresholds.t_tilt = threshold_tilt_mhz * 1e6;
    r.thresholds.t_noise = threshold_noise_mhz * 1e6;
    r.thresholds.t_up = threshold_upshift_mhz * 1e6;
    if (!(r.thresholds.t_place > 0.0) || !(r.thresholds.t_tilt > 0.0) ||
        !(r.thresholds.t_noise > 0.0) || !(r.thresholds.t_up > 0.0))
        throw ConfigError("config: classifier thresholds must be positive");

    r.k_lev = k_lev;
    if (!(r.k_lev > 0.0)) throw ConfigError("config: model.k_lev must be positive");
    r.eq30_literal = eq30_literal;

    r.output = output;
    if (r.output.landscape_format != "csv" && r.output.landscape_format != "gnuplot" &&
        r.output.landscape_format != "both")
        throw ConfigError("config: output.landscape_format must be csv, gnuplot, or both");
    if (r.output.directory.empty())
        throw ConfigError("config: output.directory must not be empty");

    return r;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return RunConfig::defaults();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return RunConfig::from_json_text(ss.str());
}

}  // namespace maglev
