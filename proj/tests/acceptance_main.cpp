// Acceptance gate: one line per criterion, nonzero exit when any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "maglev/cavity.hpp"
#include "maglev/constants.hpp"
#include "maglev/elliptic.hpp"
#include "maglev/levitation.hpp"
#include "maglev/magnet.hpp"
#include "maglev/spectra.hpp"
#include "maglev/sweeps.hpp"
#include "oracles.hpp"

using namespace maglev;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double now_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Spectrum synth_lorentzian(double f_r, double width, double span, size_t n,
                          double noise_rms, unsigned seed) {
    Spectrum s;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double hw = 0.5 * width;
    for (size_t i = 0; i < n; ++i) {
        double f = f_r - 0.5 * span + span * i / (n - 1);
        double p = 1e-4 + hw * hw / ((f - f_r) * (f - f_r) + hw * hw);
        if (noise_rms > 0.0) p *= 1.0 + noise_rms * gauss(rng);
        s.freq.push_back(f);
        s.amp.push_back(10.0 * std::log10(std::max(p, 1e-12)));
    }
    return s;
}

RingdownTrace synth_ringdown(double tau, double span, size_t n, double noise_rms,
                             unsigned seed) {
    RingdownTrace t;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (size_t i = 0; i < n; ++i) {
        double tt = span * i / (n - 1);
        double v = std::exp(-tt / tau);
        if (noise_rms > 0.0) v += noise_rms * gauss(rng);
        t.time.push_back(tt);
        t.voltage.push_back(v);
    }
    return t;
}

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    double worst = 0.0;

    pass &= std::fabs(elliptic_K(0.0) - 0.5 * PI) < 1e-12;
    pass &= std::fabs(elliptic_E(0.0) - 0.5 * PI) < 1e-12;
    pass &= std::fabs(elliptic_E(1.0) - 1.0) < 1e-12;

    for (int i = 0; i < 50; ++i) {
        double k = 0.999 * i / 49.0;
        double dk = std::fabs(elliptic_K(k) - oracle::elliptic_k(k));
        double de = std::fabs(elliptic_E(k) - oracle::elliptic_e(k));
        worst = std::max({worst, dk, de});
    }
    pass &= worst < 1e-10;

    double worst_legendre = 0.0;
    for (double k : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        double kp = std::sqrt(1.0 - k * k);
        double lhs = elliptic_K(k) * elliptic_E(kp) + elliptic_K(kp) * elliptic_E(k) -
                     elliptic_K(k) * elliptic_K(kp);
        worst_legendre = std::max(worst_legendre, std::fabs(lhs - 0.5 * PI));
    }
    pass &= worst_legendre < 1e-10;

    double dt = now_seconds(t0);
    pass &= dt < 1.0;
    report("criterion 1", pass,
           fmt("elliptic integrals: endpoint identities, quadrature agreement "
               "(max dev %.2e), Legendre relation (max dev %.2e), %.3f s",
               worst, worst_legendre, dt));
}

void criterion_2() {
    MagnetSpec m;  // reference 0.5 mm x 0.5 mm disc at 1.44 T
    double b0 = axial_field(m, m.half_thickness);
    double b25 = axial_field(m, m.half_thickness + 2.5e-3);
    bool pass = std::fabs(b0 - 0.509) / 0.509 < 0.05 && b25 < 10e-3;
    report("criterion 2", pass,
           fmt("surface field %.4f T (target 0.509 +- 5%%), field 2.5 mm above "
               "%.3f mT (< 10 mT)",
               b0, b25 * 1e3));
}

void criterion_3() {
    ShiftModel model;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double z = 10e-6 + (10e-3 - 10e-6) * i / 999.0;
        double f = freq_shift_from_height(z, model);
        double back = height_from_freq(f, model);
        worst = std::max(worst, std::fabs(back - z) / z);
    }
    bool pass = worst < 1e-9;
    report("criterion 3", pass,
           fmt("height/frequency roundtrip over 1000 points in [10 um, 10 mm]: "
               "max relative error %.2e (< 1e-9)",
               worst));
}

void criterion_4() {
    MagnetSpec mag;
    std::vector<double> brs;
    for (double br = 0.5; br <= 2.0 + 1e-12; br += 0.05) brs.push_back(br);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double br : brs) {
        MagnetSpec m = mag;
        m.remanence = br;
        double x = std::log(br);
        double y = std::log(force_balance_height(m, default_k_lev()));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double n = static_cast<double>(brs.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    auto rows = calibration_check(mag, brs, ShiftModel{}, default_k_lev());
    double ux = 0, uy = 0, uxx = 0, uxy = 0, uyy = 0;
    for (auto& [x, y] : rows) {
        ux += x; uy += y; uxx += x * x; uxy += x * y; uyy += y * y;
    }
    double cov = n * uxy - ux * uy;
    double r2 = cov * cov / ((n * uxx - ux * ux) * (n * uyy - uy * uy));

    bool pass = std::fabs(slope - 0.5) < 1e-6 && r2 > 0.999;
    report("criterion 4", pass,
           fmt("force-balance height scaling: log-log slope %.9f (0.5 +- 1e-6), "
               "linearity in sqrt remanence R^2 = %.6f (> 0.999)",
               slope, r2));
}

EquilibriumResult criterion_5() {
    auto t0 = std::chrono::steady_clock::now();
    MagnetSpec magnet;
    CavityGeometry geom;
    LevitationConfig cfg;
    EquilibriumResult eq = find_equilibrium(magnet, geom, cfg, FindOptions{});
    double dt = now_seconds(t0);
    bool pass = eq.found && std::fabs(eq.position.x - 3.5e-3) <= 0.5e-3 &&
                std::fabs(eq.position.z - 2.1e-3) <= 0.5e-3 &&
                eq.label == StabilityLabel::falls_into_gap && dt < 10.0;
    report("criterion 5", pass,
           fmt("default equilibrium at (%.3f, %.3f) mm [target (3.5, 2.1) +- 0.5], "
               "label %s, 200x200 scan in %.2f s (< 10 s)",
               eq.position.x * 1e3, eq.position.z * 1e3, to_string(eq.label), dt));
    return eq;
}

void criterion_6() {
    MagnetSpec magnet;
    CavityGeometry geom;
    LevitationConfig cfg;
    auto res = gap_sweep(magnet, geom, cfg, {2e-3, 2.5e-3, 3e-3, 4e-3, 5e-3});
    bool pass = true;
    std::string labels;
    for (size_t i = 0; i < res.rows.size(); ++i) {
        bool want_stub = res.values[i] <= 2.5e-3;
        const StabilityLabel want = want_stub ? StabilityLabel::stable_on_stub
                                              : StabilityLabel::falls_into_gap;
        pass &= res.rows[i].label == want;
        if (i) labels += ", ";
        labels += fmt("%.1f mm: %s", res.values[i] * 1e3, to_string(res.rows[i].label));
    }
    report("criterion 6", pass, "gap sweep stability crossover (" + labels + ")");
}

void criterion_7(const EquilibriumResult& base) {
    // 7a: levitation height rises with remanence
    {
        auto res = remanence_sweep(MagnetSpec{}, CavityGeometry{}, LevitationConfig{},
                                   {1.22, 1.32, 1.44}, Polarization::axial);
        bool pass = res.rows[0].found && res.rows[1].found && res.rows[2].found &&
                    res.rows[0].position.z < res.rows[1].position.z &&
                    res.rows[1].position.z < res.rows[2].position.z;
        report("criterion 7a", pass,
               fmt("height vs remanence monotone: z(1.22 T) = %.4f mm, z(1.32 T) = "
                   "%.4f mm, z(1.44 T) = %.4f mm",
                   res.rows[0].position.z * 1e3, res.rows[1].position.z * 1e3,
                   res.rows[2].position.z * 1e3));
    }

    // 7b: quarter-turn tilt pushes the minimum outward with a level floor
    {
        std::vector<double> thetas;
        for (int d = 0; d <= 90; d += 15) thetas.push_back(d * PI / 180.0);
        auto res = orientation_sweep(MagnetSpec{}, CavityGeometry{}, LevitationConfig{},
                                     thetas);
        const auto& first = res.rows.front();
        const auto& last = res.rows.back();
        double ratio = last.position.x / first.position.x;
        double dz = std::fabs(last.position.z - first.position.z) / first.position.z;
        bool pass = first.found && last.found && ratio >= 1.15 && ratio <= 1.35 &&
                    dz <= 0.15;
        report("criterion 7b", pass,
               fmt("tilt 0 -> 90 deg: radial push x90/x0 = %.3f (target 1.25 +- 0.10), "
                   "height change %.1f%% (<= 15%%)",
                   ratio, dz * 100.0));
    }

    // 7c: the scaled-up magnet moves toward the stub
    {
        auto res = size_sweep(CavityGeometry{}, LevitationConfig{}, {0.5e-3, 1.5e-3},
                              {0.5e-3, 1.5e-3});
        bool pass = res.rows[0].found && res.rows[1].found &&
                    std::fabs(res.rows[0].position.x - 3.5e-3) <= 0.3e-3 &&
                    res.rows[1].position.x <= 2.7e-3;
        report("criterion 7c", pass,
               fmt("size effect: baseline x = %.3f mm (3.5 +- 0.3), scaled-up x = "
                   "%.3f mm (<= 2.7)",
                   res.rows[0].position.x * 1e3, res.rows[1].position.x * 1e3));
        (void)base;
    }
}

void criterion_8() {
    const double f_r = 10.039e9, width = 5e6, span = 50e6;
    const size_t n = 2001;
    const double bin = span / static_cast<double>(n - 1);

    Spectrum clean = synth_lorentzian(f_r, width, span, n, 0.0, 0);
    double q3 = loaded_q(find_resonance(clean).f_r, fwhm(clean, find_resonance(clean).f_r));
    LorentzianFit fit = lorentzian_fit(clean);
    double ql = loaded_q(fit.f_r, fit.fwhm);
    bool pass_clean =
        std::fabs(q3 - 2007.8) / 2007.8 < 0.01 && std::fabs(ql - 2007.8) / 2007.8 < 0.01;

    int good = 0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        Spectrum noisy = synth_lorentzian(f_r, width, span, n, 0.01, seed);
        try {
            LorentzianFit f = lorentzian_fit(noisy);
            if (std::fabs(f.f_r - f_r) < bin && std::fabs(f.fwhm - width) / width < 0.05)
                ++good;
        } catch (const FitError&) {
        }
    }
    bool pass = pass_clean && good >= 95;
    report("criterion 8", pass,
           fmt("loaded Q on the synthetic resonance: three-dB %.1f, fit %.1f "
               "(2007.8 +- 1%%); noisy recovery %d/100 within 1 bin and 5%% width "
               "(>= 95)",
               q3, ql, good));
}

void criterion_9() {
    const double f0 = 10e9;
    bool pass = true;
    std::string detail = "ring-down roundtrip";
    unsigned seed = 11;
    for (double q_target : {1e4, 1e6, 1e9}) {
        double tau = q_target / (2.0 * PI * f0);
        RingdownTrace clean = synth_ringdown(tau, 5.0 * tau, 2048, 0.0, 0);
        double q_clean = q_from_ringdown(f0, fit_ringdown(clean).tau, 0.0);
        RingdownTrace noisy = synth_ringdown(tau, 5.0 * tau, 2048, 0.01, seed++);
        double q_noisy = q_from_ringdown(f0, fit_ringdown(noisy).tau, 0.0);
        double e_clean = std::fabs(q_clean - q_target) / q_target;
        double e_noisy = std::fabs(q_noisy - q_target) / q_target;
        pass &= e_clean < 1e-3 && e_noisy < 0.02;
        detail += fmt("; Q %.0e: clean err %.1e (< 1e-3), 1%% noise err %.1e (< 2e-2)",
                      q_target, e_clean, e_noisy);
    }
    report("criterion 9", pass, detail);
}

void criterion_10() {
    const double bare = 10.04e9, mhz = 1e6;
    bool pass = true;

    pass &= classify_event(bare, bare - 200 * mhz, bare - 50 * mhz,
                           EventContext::on_stub) == PhenomenonLabel::lift_off;
    pass &= classify_event(bare, bare, bare - 62 * mhz, EventContext::on_stub) ==
            PhenomenonLabel::placed_on_stub;
    pass &= classify_event(bare, bare - 100 * mhz, bare - 101 * mhz,
                           EventContext::on_stub) == PhenomenonLabel::no_event;
    pass &= classify_event(bare, bare - 300 * mhz, bare - 250 * mhz,
                           EventContext::on_bottom) == PhenomenonLabel::fell_to_bottom;
    pass &= classify_event(bare, bare - 62 * mhz, bare - 82 * mhz, EventContext::on_stub,
                           true) == PhenomenonLabel::tilt_on_surface;

    // published contact-slide sign patterns: (shift at axis, shift at 2 mm) MHz
    const std::vector<std::pair<double, double>> table{
        {-62, -212}, {-143, -46}, {-141, -382}, {-140, -84}, {-44, -138}};
    int slides = 0;
    for (auto [a, b] : table) {
        try {
            if (classify_event(bare, bare + a * mhz, bare + b * mhz,
                               EventContext::on_stub, true) ==
                PhenomenonLabel::sliding_to_edge)
                ++slides;
        } catch (...) {
            pass = false;
        }
    }
    pass &= slides == 5;

    std::vector<double> rot{bare - 62 * mhz, bare - 141 * mhz, bare - 63 * mhz};
    pass &= classify_series(bare, rot, EventContext::on_stub, true) ==
            PhenomenonLabel::rotation;

    report("criterion 10", pass,
           fmt("event classifier rules and the five recorded slide sign patterns "
               "(%d/5 slides, rotation series detected)",
               slides));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    EquilibriumResult eq = criterion_5();
    criterion_6();
    criterion_7(eq);
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}
