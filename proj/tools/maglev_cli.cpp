#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "maglev/config.hpp"
#include "maglev/constants.hpp"
#include "maglev/levitation.hpp"
#include "maglev/spectra.hpp"
#include "maglev/sweeps.hpp"

namespace {

using namespace maglev;

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw IoError("failed writing output file: " + path);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigError(std::string("cannot parse ") + what + " entry '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string("empty list for ") + what);
    return out;
}

std::vector<double> build_range(double start, double end, double step, const char* what) {
    if (!(step > 0.0)) throw ConfigError(std::string(what) + ": step must be positive");
    if (end < start) throw ConfigError(std::string(what) + ": end below start");
    double span = end - start;
    double nsteps = std::floor(span / step + 1e-9);
    if (nsteps > 100000.0) throw ConfigError(std::string(what) + ": too many points");
    std::vector<double> out;
    for (int i = 0; i <= static_cast<int>(nsteps); ++i) out.push_back(start + step * i);
    return out;
}

std::string equilibrium_json(const EquilibriumResult& eq) {
    nlohmann::json j;
    j["found"] = eq.found;
    if (eq.found) {
        j["x_mm"] = eq.position.x * 1e3;
        j["z_mm"] = eq.position.z * 1e3;
        j["theta_deg"] = eq.position.theta * 180.0 / PI;
        j["u_j"] = eq.u_min;
        j["hessian_eig_lo"] = eq.hessian_eig_lo;
        j["hessian_eig_hi"] = eq.hessian_eig_hi;
    } else {
        j["x_mm"] = nullptr;
        j["z_mm"] = nullptr;
        j["theta_deg"] = nullptr;
        j["u_j"] = nullptr;
        j["hessian_eig_lo"] = nullptr;
        j["hessian_eig_hi"] = nullptr;
    }
    j["label"] = to_string(eq.label);
    j["candidates"] = eq.candidates;
    return j.dump(2) + "\n";
}

Spectrum load_spectrum_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open spectrum file: " + path);
    Spectrum s = load_spectrum(in);
    if (s.sorted_on_load)
        std::cerr << "warning: spectrum rows were unsorted; sorted by frequency\n";
    return s;
}

RingdownTrace load_ringdown_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open ringdown file: " + path);
    return load_ringdown(in);
}

int run_field(const RunConfig& rc, double z_start_mm, double z_end_mm, int points,
              const std::string& output) {
    if (points < 1) throw ConfigError("field: --points must be at least 1");
    if (points > 1 && !(z_end_mm > z_start_mm))
        throw ConfigError("field: empty z range");
    if (z_start_mm < 0.0) throw ConfigError("field: z range must start at or above 0");
    ResolvedConfig cfg = rc.resolve();

    std::string text = "z_m,b_t\n";
    char buf[64];
    for (int i = 0; i < points; ++i) {
        double s_mm = points == 1
                          ? z_start_mm
                          : z_start_mm + (z_end_mm - z_start_mm) * i / (points - 1);
        double s = s_mm * 1e-3;
        double b = axial_field(cfg.magnet, s + cfg.magnet.half_thickness);
        std::snprintf(buf, sizeof buf, "%.9e,%.9e\n", s, b);
        text += buf;
    }
    write_text(output, text);
    return 0;
}

int run_landscape(const RunConfig& rc, int nx, int nz, double z_max_mm,
                  const std::string& grid_basename, const std::string& output) {
    if (nx < 2 || nz < 2) throw ConfigError("landscape: grid must be at least 2x2");
    if (!(z_max_mm > 0.0)) throw ConfigError("landscape: --z-max-mm must be positive");
    ResolvedConfig cfg = rc.resolve();

    FindOptions opts;
    opts.nx = nx;
    opts.nz = nz;
    opts.z_max = z_max_mm * 1e-3;

    double d = cfg.levitation.wall_distance > 0.0 ? cfg.levitation.wall_distance
                                                  : cfg.cavity.r_c;
    GridSpec grid;
    grid.x0 = 0.0;
    grid.x1 = d * (nx - 1) / nx;
    grid.nx = nx;
    grid.z0 = opts.z_max / nz;
    grid.z1 = opts.z_max;
    grid.nz = nz;
    EnergyLandscape ls = energy_landscape(cfg.magnet, cfg.cavity, cfg.levitation, grid);

    std::filesystem::path dir(cfg.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + cfg.output.directory);
    if (cfg.output.landscape_format == "csv" || cfg.output.landscape_format == "both") {
        std::ofstream out(dir / (grid_basename + ".csv"), std::ios::binary);
        if (!out) throw IoError("cannot open landscape csv output");
        write_landscape_csv(ls, out);
    }
    if (cfg.output.landscape_format == "gnuplot" || cfg.output.landscape_format == "both") {
        std::ofstream out(dir / (grid_basename + ".dat"), std::ios::binary);
        if (!out) throw IoError("cannot open landscape gnuplot output");
        write_landscape_gnuplot(ls, out);
    }

    EquilibriumResult eq = find_equilibrium(cfg.magnet, cfg.cavity, cfg.levitation, opts);
    write_text(output, equilibrium_json(eq));
    return 0;
}

int run_sweep(const RunConfig& rc, const std::string& kind, double start, double end,
              double step, const std::string& polarization, const std::string& radii_mm,
              const std::string& thicknesses_mm, const std::string& output) {
    ResolvedConfig cfg = rc.resolve();
    SweepResult res;
    if (kind == "gap") {
        std::vector<double> gaps_m;
        for (double g : build_range(start, end, step, "gap sweep")) gaps_m.push_back(g * 1e-3);
        res = gap_sweep(cfg.magnet, cfg.cavity, cfg.levitation, gaps_m);
    } else if (kind == "remanence") {
        Polarization pol;
        if (polarization == "axial") pol = Polarization::axial;
        else if (polarization == "radial") pol = Polarization::radial;
        else throw ConfigError("sweep: --polarization must be axial or radial");
        res = remanence_sweep(cfg.magnet, cfg.cavity, cfg.levitation,
                              build_range(start, end, step, "remanence sweep"), pol);
    } else if (kind == "orientation") {
        std::vector<double> rad;
        for (double deg : build_range(start, end, step, "orientation sweep"))
            rad.push_back(deg * PI / 180.0);
        res = orientation_sweep(cfg.magnet, cfg.cavity, cfg.levitation, rad);
    } else if (kind == "size") {
        if (radii_mm.empty() || thicknesses_mm.empty())
            throw ConfigError("sweep: size kind needs --radii-mm and --thicknesses-mm");
        std::vector<double> radii, thick;
        for (double r : parse_list(radii_mm, "--radii-mm")) radii.push_back(r * 1e-3);
        for (double t : parse_list(thicknesses_mm, "--thicknesses-mm"))
            thick.push_back(t * 1e-3);
        res = size_sweep(cfg.cavity, cfg.levitation, radii, thick);
    } else {
        throw ConfigError("sweep: unknown kind '" + kind +
                          "' (expected gap, remanence, orientation, or size)");
    }
    write_text(output, res.to_csv());
    return 0;
}

int run_qfit(const RunConfig& rc, const std::string& path, const std::string& kind,
             const std::string& method, double beta1, bool has_beta1_powers,
             double p_forward, double p_emitted, double beta2, bool has_beta2,
             bool csv_out, const std::string& output) {
    Spectrum s = load_spectrum_file(path);
    if (kind == "S21") s.kind = SpectrumKind::S21;
    else if (kind == "S11") s.kind = SpectrumKind::S11;
    else if (!kind.empty()) throw ConfigError("qfit: --kind must be S11 or S21");

    QReport rep;
    if (method == "three_db") {
        ResonancePoint pk = find_resonance(s);
        rep.f_r = pk.f_r;
        rep.fwhm = fwhm(s, pk.f_r);
        rep.method = QMethod::three_dB;
    } else if (method == "lorentzian") {
        LorentzianFit fit = lorentzian_fit(s);
        rep.f_r = fit.f_r;
        rep.fwhm = fit.fwhm;
        rep.method = QMethod::lorentzian;
    } else {
        throw ConfigError("qfit: --method must be three_db or lorentzian");
    }

    if (has_beta1_powers) {
        beta1 = coupling_from_powers(p_forward, p_emitted);
        if (rc.eq30_literal) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9g", eq30_literal(p_forward, p_emitted));
            std::cerr << "eq30 literal reading (printed left-hand side as Q_0): " << buf
                      << "\n";
        }
    }
    rep.q_loaded = loaded_q(rep.f_r, rep.fwhm);
    rep.beta1 = beta1;
    rep.has_beta2 = has_beta2;
    if (has_beta2) {
        rep.beta2 = beta2;
        rep.q0 = intrinsic_q(rep.q_loaded, beta1, beta2);
    } else {
        rep.q0 = intrinsic_q(rep.q_loaded, beta1);
    }
    write_text(output, csv_out ? rep.to_csv_line() + "\n" : rep.to_json() + "\n");
    return 0;
}

int run_ringdown(const std::string& path, double f0_ghz, double beta, bool csv_out,
                 const std::string& output) {
    if (!(f0_ghz > 0.0)) throw ConfigError("ringdown: --f0-ghz must be positive");
    if (beta < 0.0) throw ConfigError("ringdown: --beta must be nonnegative");
    RingdownTrace trace = load_ringdown_file(path);
    RingdownFit fit = fit_ringdown(trace);

    double f0 = f0_ghz * 1e9;
    QReport rep;
    rep.method = QMethod::ringdown;
    rep.f_r = f0;
    rep.q_loaded = q_from_ringdown(f0, fit.tau, 0.0);
    rep.fwhm = f0 / rep.q_loaded;
    rep.beta1 = beta;
    rep.q0 = q_from_ringdown(f0, fit.tau, beta);
    write_text(output, csv_out ? rep.to_csv_line() + "\n" : rep.to_json() + "\n");
    return 0;
}

int run_classify(const RunConfig& rc, double bare_ghz, double before_ghz, double after_ghz,
                 bool has_pair, const std::string& series_ghz, const std::string& context,
                 bool in_contact, const std::string& output) {
    ResolvedConfig cfg = rc.resolve();
    EventContext ctx;
    if (context == "stub") ctx = EventContext::on_stub;
    else if (context == "bottom") ctx = EventContext::on_bottom;
    else throw ConfigError("classify: --context must be stub or bottom");

    PhenomenonLabel label;
    if (!series_ghz.empty()) {
        std::vector<double> freqs;
        for (double f : parse_list(series_ghz, "--series-ghz")) freqs.push_back(f * 1e9);
        if (freqs.size() < 2) throw ConfigError("classify: series needs at least 2 points");
        label = classify_series(bare_ghz * 1e9, freqs, ctx, in_contact, cfg.thresholds);
    } else {
        if (!has_pair)
            throw ConfigError("classify: provide --before-ghz/--after-ghz or --series-ghz");
        label = classify_event(bare_ghz * 1e9, before_ghz * 1e9, after_ghz * 1e9, ctx,
                               in_contact, cfg.thresholds);
    }
    write_text(output, std::string(to_string(label)) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microwave cavity levitation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file");

    auto* cmd_field = app.add_subcommand("field", "Tabulate the on-axis magnet field");
    cmd_field->fallthrough();
    double z_start_mm = 0.0, z_end_mm = 4.0;
    int points = 401;
    std::string field_out = "-";
    cmd_field->add_option("--z-start-mm", z_start_mm, "range start above the surface");
    cmd_field->add_option("--z-end-mm", z_end_mm, "range end above the surface");
    cmd_field->add_option("--points", points, "number of samples");
    cmd_field->add_option("-o,--output", field_out, "output file or - for stdout");

    auto* cmd_landscape =
        app.add_subcommand("landscape", "Energy landscape grid and equilibrium report");
    cmd_landscape->fallthrough();
    int nx = 200, nz = 200;
    double z_max_mm = 45.0;
    std::string grid_basename = "landscape";
    std::string landscape_out = "-";
    cmd_landscape->add_option("--nx", nx, "grid points in x");
    cmd_landscape->add_option("--nz", nz, "grid points in z");
    cmd_landscape->add_option("--z-max-mm", z_max_mm, "scan window height");
    cmd_landscape->add_option("--grid-basename", grid_basename,
                              "basename of the grid files in the output directory");
    cmd_landscape->add_option("-o,--output", landscape_out,
                              "equilibrium JSON file or - for stdout");

    auto* cmd_sweep = app.add_subcommand("sweep", "Equilibrium sweeps over one parameter");
    cmd_sweep->fallthrough();
    std::string sweep_kind;
    double sweep_start = 0.0, sweep_end = 0.0, sweep_step = 1.0;
    std::string polarization = "axial";
    std::string radii_mm, thicknesses_mm;
    std::string sweep_out = "-";
    cmd_sweep->add_option("--kind", sweep_kind, "gap | remanence | orientation | size")
        ->required();
    cmd_sweep->add_option("--start", sweep_start, "range start (mm, T, or deg)");
    cmd_sweep->add_option("--end", sweep_end, "range end (mm, T, or deg)");
    cmd_sweep->add_option("--step", sweep_step, "range step (mm, T, or deg)");
    cmd_sweep->add_option("--polarization", polarization, "axial | radial (remanence)");
    cmd_sweep->add_option("--radii-mm", radii_mm, "comma list for size sweeps");
    cmd_sweep->add_option("--thicknesses-mm", thicknesses_mm, "comma list for size sweeps");
    cmd_sweep->add_option("-o,--output", sweep_out, "output file or - for stdout");

    auto* cmd_qfit = app.add_subcommand("qfit", "Quality factor from a spectrum CSV");
    cmd_qfit->fallthrough();
    std::string qfit_file;
    std::string qfit_kind;
    std::string qfit_method = "three_db";
    double beta1 = 0.0, beta2 = 0.0;
    double p_forward = 0.0, p_emitted = 0.0;
    bool qfit_csv = false;
    std::string qfit_out = "-";
    cmd_qfit->add_option("file", qfit_file, "spectrum CSV")->required();
    cmd_qfit->add_option("--kind", qfit_kind, "override spectrum kind: S11 | S21");
    cmd_qfit->add_option("--method", qfit_method, "three_db | lorentzian");
    auto* opt_beta1 = cmd_qfit->add_option("--beta1", beta1, "input coupling");
    auto* opt_beta2 = cmd_qfit->add_option("--beta2", beta2, "output coupling");
    auto* opt_pf = cmd_qfit->add_option("--forward-power-w", p_forward,
                                        "forward power for the coupling ratio");
    auto* opt_pe = cmd_qfit->add_option("--emitted-power-w", p_emitted,
                                        "emitted power for the coupling ratio");
    opt_pf->needs(opt_pe);
    opt_pe->needs(opt_pf);
    opt_pf->excludes(opt_beta1);
    cmd_qfit->add_flag("--csv", qfit_csv, "emit the one-line CSV form");
    cmd_qfit->add_option("-o,--output", qfit_out, "output file or - for stdout");

    auto* cmd_ringdown = app.add_subcommand("ringdown", "Quality factor from a decay trace");
    cmd_ringdown->fallthrough();
    std::string ringdown_file;
    double f0_ghz = 10.04, ringdown_beta = 0.0;
    bool ringdown_csv = false;
    std::string ringdown_out = "-";
    cmd_ringdown->add_option("file", ringdown_file, "ringdown CSV")->required();
    cmd_ringdown->add_option("--f0-ghz", f0_ghz, "resonance frequency");
    cmd_ringdown->add_option("--beta", ringdown_beta, "coupling");
    cmd_ringdown->add_flag("--csv", ringdown_csv, "emit the one-line CSV form");
    cmd_ringdown->add_option("-o,--output", ringdown_out, "output file or - for stdout");

    auto* cmd_classify =
        app.add_subcommand("classify", "Label an event from frequency observations");
    cmd_classify->fallthrough();
    double bare_ghz = 10.04, before_ghz = 0.0, after_ghz = 0.0;
    std::string series_ghz;
    std::string context = "stub";
    bool in_contact = false;
    std::string classify_out = "-";
    cmd_classify->add_option("--bare-ghz", bare_ghz, "bare cavity frequency");
    auto* opt_before = cmd_classify->add_option("--before-ghz", before_ghz, "before event");
    auto* opt_after = cmd_classify->add_option("--after-ghz", after_ghz, "after event");
    opt_before->needs(opt_after);
    opt_after->needs(opt_before);
    cmd_classify->add_option("--series-ghz", series_ghz, "comma list of frequencies");
    cmd_classify->add_option("--context", context, "stub | bottom");
    cmd_classify->add_flag("--in-contact", in_contact, "magnet mechanically held");
    cmd_classify->add_option("-o,--output", classify_out, "output file or - for stdout");

    auto* cmd_print = app.add_subcommand("print-config", "Emit the resolved configuration");
    cmd_print->fallthrough();
    std::string print_out = "-";
    cmd_print->add_option("-o,--output", print_out, "output file or - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig rc = load_config(config_path);
        if (cmd_field->parsed())
            return run_field(rc, z_start_mm, z_end_mm, points, field_out);
        if (cmd_landscape->parsed())
            return run_landscape(rc, nx, nz, z_max_mm, grid_basename, landscape_out);
        if (cmd_sweep->parsed())
            return run_sweep(rc, sweep_kind, sweep_start, sweep_end, sweep_step,
                             polarization, radii_mm, thicknesses_mm, sweep_out);
        if (cmd_qfit->parsed())
            return run_qfit(rc, qfit_file, qfit_kind, qfit_method, beta1,
                            opt_pf->count() > 0, p_forward, p_emitted, beta2,
                            opt_beta2->count() > 0, qfit_csv, qfit_out);
        if (cmd_ringdown->parsed())
            return run_ringdown(ringdown_file, f0_ghz, ringdown_beta, ringdown_csv,
                                ringdown_out);
        if (cmd_classify->parsed())
            return run_classify(rc, bare_ghz, before_ghz, after_ghz,
                                opt_before->count() > 0, series_ghz, context, in_contact,
                                classify_out);
        if (cmd_print->parsed()) {
            RunConfig resolved = rc;
            resolved.resolve();  // validate before printing
            write_text(print_out, resolved.to_json_text());
            return 0;
        }
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
