#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maglev/spectra.hpp"

using namespace maglev;

namespace {

// Lorentzian line in linear power, emitted as a dB spectrum.
Spectrum make_lorentzian(double f_r, double width, double span, size_t n,
                         double background = 1e-4, bool dip = false,
                         double noise_rms = 0.0, unsigned seed = 0) {
    Spectrum s;
    s.kind = dip ? SpectrumKind::S11 : SpectrumKind::S21;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double hw = 0.5 * width;
    for (size_t i = 0; i < n; ++i) {
        double f = f_r - 0.5 * span + span * i / (n - 1);
        double shape = hw * hw / ((f - f_r) * (f - f_r) + hw * hw);
        double p = dip ? 1.0 - 0.999 * shape : background + shape;
        if (noise_rms > 0.0) p *= 1.0 + noise_rms * gauss(rng);
        s.freq.push_back(f);
        s.amp.push_back(10.0 * std::log10(std::max(p, 1e-12)));
    }
    return s;
}

RingdownTrace make_ringdown(double tau, double amp, double offset, double span, size_t n,
                            double noise_rms = 0.0, unsigned seed = 0) {
    RingdownTrace t;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (size_t i = 0; i < n; ++i) {
        double tt = span * i / (n - 1);
        double v = amp * std::exp(-tt / tau) + offset;
        if (noise_rms > 0.0) v += amp * noise_rms * gauss(rng);
        t.time.push_back(tt);
        t.voltage.push_back(v);
    }
    return t;
}

std::string spectrum_csv(const std::vector<std::pair<double, double>>& rows) {
    std::string out = "frequency_hz,amplitude_db\n";
    char buf[64];
    for (auto& [f, a] : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", f, a);
        out += buf;
    }
    return out;
}

}  // namespace

TEST_CASE("spectrum loading") {
    SUBCASE("well-formed file") {
        std::vector<std::pair<double, double>> rows;
        for (int i = 0; i < 1001; ++i) rows.emplace_back(1e9 + i * 1e5, -20.0 + 0.01 * i);
        std::istringstream in(spectrum_csv(rows));
        Spectrum s = load_spectrum(in);
        CHECK(s.size() == 1001);
        CHECK(s.kind == SpectrumKind::S21);
        CHECK_FALSE(s.sorted_on_load);
    }

    SUBCASE("duplicate frequency") {
        std::istringstream in(
            "frequency_hz,amplitude_db\n"
            "1e9,-20\n1.1e9,-21\n1.1e9,-22\n1.2e9,-20\n1.3e9,-20\n"
            "1.4e9,-20\n1.5e9,-20\n1.6e9,-20\n");
        CHECK_THROWS_WITH_AS(load_spectrum(in),
                             doctest::Contains("non-monotonic frequency"), IoError);
    }

    SUBCASE("unsorted unique rows are sorted with a flag") {
        std::istringstream in(
            "frequency_hz,amplitude_db\n"
            "1.2e9,-22\n1.0e9,-20\n1.1e9,-21\n1.3e9,-23\n1.4e9,-24\n"
            "1.5e9,-25\n1.6e9,-26\n1.7e9,-27\n");
        Spectrum s = load_spectrum(in);
        CHECK(s.sorted_on_load);
        CHECK(s.freq.front() == doctest::Approx(1.0e9));
        CHECK(s.amp.front() == doctest::Approx(-20.0));
        CHECK_NOTHROW(s.validate());
    }

    SUBCASE("malformed row names the line") {
        std::istringstream in(
            "frequency_hz,amplitude_db\n"
            "1e9,-20\n1.1e9,-21\n1.2e9,oops\n1.3e9,-20\n1.4e9,-20\n"
            "1.5e9,-20\n1.6e9,-20\n1.7e9,-20\n");
        CHECK_THROWS_WITH_AS(load_spectrum(in), doctest::Contains("line 4"), IoError);
    }

    SUBCASE("too few rows") {
        std::istringstream in("frequency_hz,amplitude_db\n1e9,-20\n1.1e9,-21\n");
        CHECK_THROWS_AS(load_spectrum(in), IoError);
    }

    SUBCASE("kind column") {
        std::istringstream in(
            "frequency_hz,amplitude_db,kind\n"
            "1e9,-20,S11\n1.1e9,-21,S11\n1.2e9,-22,S11\n1.3e9,-23,S11\n"
            "1.4e9,-24,S11\n1.5e9,-25,S11\n1.6e9,-26,S11\n1.7e9,-27,S11\n");
        Spectrum s = load_spectrum(in);
        CHECK(s.kind == SpectrumKind::S11);
    }

    SUBCASE("bad header") {
        std::istringstream in("freq,amp\n1,2\n");
        CHECK_THROWS_AS(load_spectrum(in), IoError);
    }
}

TEST_CASE("resonance location") {
    Spectrum peak = make_lorentzian(10.039e9, 5e6, 50e6, 2001);
    ResonancePoint pk = find_resonance(peak);
    double bin = 50e6 / 2000;
    CHECK(std::fabs(pk.f_r - 10.039e9) < 0.5 * bin);

    SUBCASE("dip and peak conventions agree") {
        Spectrum dip = make_lorentzian(10.039e9, 5e6, 50e6, 2001, 1e-4, true);
        ResonancePoint dd = find_resonance(dip);
        CHECK(std::fabs(dd.f_r - pk.f_r) < bin);
    }

    SUBCASE("flat spectrum fails at the edge") {
        Spectrum flat;
        for (int i = 0; i < 16; ++i) {
            flat.freq.push_back(1e9 + i * 1e6);
            flat.amp.push_back(-20.0);
        }
        CHECK_THROWS_AS(find_resonance(flat), FitError);
    }
}

TEST_CASE("half-power width") {
    Spectrum s = make_lorentzian(10.039e9, 5e6, 50e6, 2001);
    double f_r = find_resonance(s).f_r;
    double w = fwhm(s, f_r);
    CHECK(w == doctest::Approx(5e6).epsilon(0.01));

    SUBCASE("invariant under a constant dB offset") {
        Spectrum shifted = s;
        for (double& a : shifted.amp) a += 7.3;
        CHECK(fwhm(shifted, f_r) == doctest::Approx(w).epsilon(1e-12));
    }

    SUBCASE("dip and peak conventions are mirror images") {
        Spectrum dip = s;
        dip.kind = SpectrumKind::S11;
        for (double& a : dip.amp) a = -a;
        CHECK(find_resonance(dip).f_r == doctest::Approx(f_r).epsilon(1e-12));
        CHECK(fwhm(dip, f_r) == doctest::Approx(w).epsilon(1e-9));
    }

    SUBCASE("truncated span fails") {
        Spectrum cut = make_lorentzian(10.039e9, 5e6, 4e6, 101);
        CHECK_THROWS_WITH_AS(fwhm(cut, find_resonance(cut).f_r),
                             doctest::Contains("insufficient span"), FitError);
    }
}

TEST_CASE("loaded and intrinsic quality factors") {
    CHECK(loaded_q(10.039e9, 5e6) == doctest::Approx(2007.8).epsilon(1e-9));
    CHECK(loaded_q(5e6, 5e6) == doctest::Approx(1.0));
    CHECK(loaded_q(2 * 10.039e9, 2 * 5e6) == doctest::Approx(2007.8).epsilon(1e-12));
    CHECK_THROWS_AS(loaded_q(10e9, 0.0), std::domain_error);

    CHECK(intrinsic_q(1000.0, 0.0) == doctest::Approx(1000.0));
    CHECK(intrinsic_q(1000.0, 1.0) == doctest::Approx(2000.0));
    CHECK(intrinsic_q(1000.0, 0.5, 0.5) == doctest::Approx(2000.0));
    CHECK_THROWS_AS(intrinsic_q(1000.0, -0.1), std::domain_error);
    CHECK_THROWS_AS(intrinsic_q(1000.0, 0.1, -0.1), std::domain_error);
    CHECK(intrinsic_q(1234.0, 0.7, 0.3) >= loaded_q(1234.0, 1.0));
}

TEST_CASE("coupling from power ratio") {
    CHECK(coupling_from_powers(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(coupling_from_powers(4.0, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_WITH_AS(coupling_from_powers(1.0, 16.0),
                         doctest::Contains("out of model range"), std::domain_error);
    CHECK_THROWS_AS(coupling_from_powers(-1.0, 1.0), std::domain_error);
    CHECK(eq30_literal(4.0, 1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ring-down fitting") {
    SUBCASE("noiseless roundtrip") {
        RingdownTrace t = make_ringdown(1e-6, 1.0, 0.0, 5e-6, 512);
        RingdownFit fit = fit_ringdown(t);
        CHECK(std::fabs(fit.tau - 1e-6) / 1e-6 < 1e-6);
        CHECK(fit.rms_residual < 1e-8);
    }

    SUBCASE("offset trace") {
        RingdownTrace t = make_ringdown(1e-6, 1.0, 0.1, 5e-6, 512);
        RingdownFit fit = fit_ringdown(t);
        CHECK(std::fabs(fit.tau - 1e-6) / 1e-6 < 1e-3);
        CHECK(fit.offset == doctest::Approx(0.1).epsilon(1e-3));
    }

    SUBCASE("constant trace fails") {
        RingdownTrace t;
        for (int i = 0; i < 32; ++i) {
            t.time.push_back(i * 1e-7);
            t.voltage.push_back(0.5);
        }
        CHECK_THROWS_AS(fit_ringdown(t), FitError);
    }

    SUBCASE("pulse edge is skipped") {
        RingdownTrace t;
        for (int i = 0; i < 16; ++i) {  // fill ramp before the decay
            t.time.push_back(i * 1e-8);
            t.voltage.push_back(0.1 * i / 15.0);
        }
        for (int i = 0; i < 256; ++i) {
            double tt = 16e-8 + i * 2e-8;
            t.time.push_back(tt);
            t.voltage.push_back(std::exp(-(tt - 16e-8) / 1e-6));
        }
        RingdownFit fit = fit_ringdown(t);
        CHECK(fit.tau == doctest::Approx(1e-6).epsilon(1e-4));
    }
}

TEST_CASE("ring-down quality factor") {
    CHECK(q_from_ringdown(10e9, 1e-6, 0.0) == doctest::Approx(6.2832e4).epsilon(1e-4));
    CHECK(q_from_ringdown(10e9, 1e-6, 1.0) ==
          doctest::Approx(2.0 * q_from_ringdown(10e9, 1e-6, 0.0)).epsilon(1e-12));
    CHECK_THROWS_AS(q_from_ringdown(0.0, 1e-6, 0.0), std::domain_error);
    CHECK_THROWS_AS(q_from_ringdown(10e9, 1e-6, -0.5), std::domain_error);

    SUBCASE("roundtrip from a target quality factor") {
        double f0 = 10e9, q_target = 1e6, beta = 0.3;
        double tau = q_target / (2.0 * 3.14159265358979323846 * f0 * (1.0 + beta));
        RingdownTrace t = make_ringdown(tau, 1.0, 0.0, 5 * tau, 1024);
        RingdownFit fit = fit_ringdown(t);
        double q = q_from_ringdown(f0, fit.tau, beta);
        CHECK(std::fabs(q - q_target) / q_target < 1e-3);
    }
}

TEST_CASE("lorentzian least-squares fit") {
    SUBCASE("exact recovery") {
        Spectrum s = make_lorentzian(10.039e9, 5e6, 50e6, 2001);
        LorentzianFit fit = lorentzian_fit(s);
        CHECK(std::fabs(fit.f_r - 10.039e9) / 10.039e9 < 1e-3);
        CHECK(std::fabs(fit.fwhm - 5e6) / 5e6 < 1e-3);
        CHECK(fit.rms_residual < 1e-9);
    }

    SUBCASE("agrees with the three dB method on clean data") {
        Spectrum s = make_lorentzian(10.039e9, 5e6, 50e6, 2001);
        double w3 = fwhm(s, find_resonance(s).f_r);
        LorentzianFit fit = lorentzian_fit(s);
        CHECK(std::fabs(fit.fwhm - w3) / w3 < 0.02);
    }

    SUBCASE("noise robustness over seeds") {
        double bin = 50e6 / 2000;
        int good = 0;
        for (unsigned seed = 0; seed < 10; ++seed) {
            Spectrum s = make_lorentzian(10.039e9, 5e6, 50e6, 2001, 1e-4, false, 0.01, seed);
            LorentzianFit fit = lorentzian_fit(s);
            if (std::fabs(fit.f_r - 10.039e9) < bin && std::fabs(fit.fwhm - 5e6) / 5e6 < 0.05)
                ++good;
        }
        CHECK(good >= 9);
    }

    SUBCASE("dip spectra fit with negative amplitude") {
        Spectrum s = make_lorentzian(10.039e9, 5e6, 50e6, 2001, 1e-4, true);
        LorentzianFit fit = lorentzian_fit(s);
        CHECK(std::fabs(fit.fwhm - 5e6) / 5e6 < 0.05);
    }
}

TEST_CASE("simplified intrinsic quality factor") {
    CHECK(simplified_q0(10.0, 10.0) == doctest::Approx(1.0));
    CHECK(simplified_q0(300.0, 1e-8) == doctest::Approx(3e10).epsilon(1e-12));
    CHECK(simplified_q0(300.0, 0.5e-8) ==
          doctest::Approx(2.0 * simplified_q0(300.0, 1e-8)).epsilon(1e-12));
    CHECK_THROWS_AS(simplified_q0(300.0, 0.0), std::domain_error);
}

TEST_CASE("q report serialization") {
    QReport rep;
    rep.f_r = 10.039e9;
    rep.fwhm = 5e6;
    rep.q_loaded = 2007.8;
    rep.beta1 = 0.5;
    rep.q0 = 3011.7;
    rep.method = QMethod::three_dB;
    std::string j = rep.to_json();
    CHECK(j.find("\"f_r_hz\"") != std::string::npos);
    CHECK(j.find("\"fwhm_hz\"") != std::string::npos);
    CHECK(j.find("\"q_loaded\"") != std::string::npos);
    CHECK(j.find("\"beta1\"") != std::string::npos);
    CHECK(j.find("\"beta2\": null") != std::string::npos);
    CHECK(j.find("\"q0\"") != std::string::npos);
    CHECK(j.find("\"method\": \"three_dB\"") != std::string::npos);

    std::string line = rep.to_csv_line();
    CHECK(line == "1.0039e+10,5000000,2007.8,0.5,,3011.7,three_dB");

    rep.has_beta2 = true;
    rep.beta2 = 0.25;
    rep.method = QMethod::lorentzian;
    CHECK(rep.to_json().find("\"beta2\": 0.25") != std::string::npos);
    CHECK(rep.to_csv_line().find(",0.25,") != std::string::npos);
}

TEST_CASE("ring-down trace validation") {
    RingdownTrace t = make_ringdown(1e-6, 1.0, 0.0, 5e-6, 32);
    CHECK_NOTHROW(t.validate());
    t.time[5] = t.time[6];
    CHECK_THROWS_AS(t.validate(), IoError);
    RingdownTrace small = make_ringdown(1e-6, 1.0, 0.0, 5e-6, 17);
    small.time.pop_back();
    small.voltage.pop_back();
    CHECK_NOTHROW(small.validate());
    small.time.pop_back();
    CHECK_THROWS_AS(small.validate(), IoError);
}

TEST_CASE("ring-down loading") {
    std::string text = "time_s,voltage_v\n";
    char buf[64];
    for (int i = 0; i < 32; ++i) {
        std::snprintf(buf, sizeof buf, "%.8e,%.8e\n", i * 1e-8,
                      std::exp(-i * 1e-8 / 1e-6));
        text += buf;
    }
    std::istringstream in(text);
    RingdownTrace t = load_ringdown(in);
    CHECK(t.size() == 32);

    std::istringstream bad("time_s,voltage_v\n0,1\n1e-8,x\n");
    CHECK_THROWS_WITH_AS(load_ringdown(bad), doctest::Contains("line 3"), IoError);
}
