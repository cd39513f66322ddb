#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "maglev/errors.hpp"

namespace maglev {

enum class SpectrumKind { S21, S11 };

struct Spectrum {
    std::vector<double> freq;  // Hz, strictly increasing
    std::vector<double> amp;   // dB
    SpectrumKind kind = SpectrumKind::S21;
    bool sorted_on_load = false;

    size_t size() const { return freq.size(); }
    void validate() const;
};

struct RingdownTrace {
    std::vector<double> time;     // s, strictly increasing
    std::vector<double> voltage;  // V
    double f0_guess = 0.0;        // Hz, optional metadata

    size_t size() const { return time.size(); }
    void validate() const;
};

enum class QMethod { three_dB, lorentzian, ringdown };

const char* to_string(QMethod method);

struct QReport {
    double f_r = 0.0;    // Hz
    double fwhm = 0.0;   // Hz
    double q_loaded = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    bool has_beta2 = false;
    double q0 = 0.0;
    QMethod method = QMethod::three_dB;

    std::string to_json() const;
    std::string to_csv_line() const;
};

// CSV with header frequency_hz,amplitude_db and an optional kind column.
// Unsorted rows are sorted with a warning flag; duplicate frequencies and
// malformed rows raise IoError with the line number.
Spectrum load_spectrum(std::istream& in);

// CSV with header time_s,voltage_v.
RingdownTrace load_ringdown(std::istream& in);

// Extremum of the spectrum (maximum for S21, minimum for S11) with 3-point
// parabolic sub-sample refinement. Throws FitError when the extremum sits
// at the window edge.
struct ResonancePoint {
    double f_r;      // Hz
    double peak_db;  // refined extremum amplitude
};
ResonancePoint find_resonance(const Spectrum& s);

// Width between the linear-interpolated 3 dB crossings on each side of f_r.
double fwhm(const Spectrum& s, double f_r);

// Q_L = f_r / delta_f
double loaded_q(double f_r, double delta_f);

// Q_0 = Q_L (1 + beta1 [+ beta2])
double intrinsic_q(double q_loaded, double beta1);
double intrinsic_q(double q_loaded, double beta1, double beta2);

// beta = 1 / (2 sqrt(P_f / P_e) - 1)
double coupling_from_powers(double p_f, double p_e);

// The same right-hand side read literally as Q_0 (for comparison only).
double eq30_literal(double p_f, double p_e);

struct RingdownFit {
    double tau = 0.0;        // s
    double amplitude = 0.0;  // V at the decay start
    double offset = 0.0;     // V
    double rms_residual = 0.0;
    int iterations = 0;
};

// Least-squares fit of V(t) = A exp(-t/tau) + c over the decay segment
// starting at the post-pulse maximum. Deterministic initialization; throws
// FitError for non-decaying traces.
RingdownFit fit_ringdown(const RingdownTrace& trace);

// Q_0 = 2 pi f0 tau_d (1 + beta)
double q_from_ringdown(double f0, double tau_d, double beta);

struct LorentzianFit {
    double f_r = 0.0;       // Hz
    double fwhm = 0.0;      // Hz
    double peak_db = 0.0;   // height at resonance
    double background_db = 0.0;
    double rms_residual = 0.0;  // linear power units
    int iterations = 0;
};

// Least-squares Lorentzian in linear power with constant background.
LorentzianFit lorentzian_fit(const Spectrum& s);

// Q_0 = G / R_s with a user-supplied geometry factor.
double simplified_q0(double geometry_factor, double surface_resistance);

}  // namespace maglev
