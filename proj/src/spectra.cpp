#include "maglev/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace maglev {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& tok, size_t line_no, const char* what) {
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::exception&) {
        throw IoError("line " + std::to_string(line_no) + ": cannot parse " +
                      what + " from '" + tok + "'");
    }
}

// Solves the n x n system M x = r in place (partial pivoting, n <= 4).
bool solve_dense(double m[4][4], double r[4], double x[4], int n) {
    int piv[4] = {0, 1, 2, 3};
    for (int col = 0; col < n; ++col) {
        int best = col;
        for (int row = col + 1; row < n; ++row)
            if (std::fabs(m[piv[row]][col]) > std::fabs(m[piv[best]][col])) best = row;
        std::swap(piv[col], piv[best]);
        double diag = m[piv[col]][col];
        if (std::fabs(diag) < 1e-300) return false;
        for (int row = col + 1; row < n; ++row) {
            double f = m[piv[row]][col] / diag;
            for (int k = col; k < n; ++k) m[piv[row]][k] -= f * m[piv[col]][k];
            r[piv[row]] -= f * r[piv[col]];
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        double acc = r[piv[col]];
        for (int k = col + 1; k < n; ++k) acc -= m[piv[col]][k] * x[k];
        x[col] = acc / m[piv[col]][col];
    }
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

double fmt_or_nan(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

void Spectrum::validate() const {
    if (freq.size() != amp.size())
        throw IoError("spectrum: frequency and amplitude counts differ");
    if (freq.size() < 8) throw IoError("spectrum: needs at least 8 samples");
    for (size_t i = 0; i < freq.size(); ++i) {
        if (!std::isfinite(freq[i]) || !std::isfinite(amp[i]))
            throw IoError("spectrum: non-finite sample");
        if (i > 0 && !(freq[i] > freq[i - 1]))
            throw IoError("spectrum: frequencies must be strictly increasing");
    }
}

void RingdownTrace::validate() const {
    if (time.size() != voltage.size())
        throw IoError("ringdown: time and voltage counts differ");
    if (time.size() < 16) throw IoError("ringdown: needs at least 16 samples");
    for (size_t i = 0; i < time.size(); ++i) {
        if (!std::isfinite(time[i]) || !std::isfinite(voltage[i]))
            throw IoError("ringdown: non-finite sample");
        if (i > 0 && !(time[i] > time[i - 1]))
            throw IoError("ringdown: times must be strictly increasing");
    }
}

const char* to_string(QMethod method) {
    switch (method) {
        case QMethod::three_dB: return "three_dB";
        case QMethod::lorentzian: return "lorentzian";
        case QMethod::ringdown: return "ringdown";
    }
    return "unknown";
}

Spectrum load_spectrum(std::istream& in) {
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) throw IoError("empty spectrum file");
    ++line_no;
    auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "frequency_hz" || header[1] != "amplitude_db")
        throw IoError("line 1: expected header frequency_hz,amplitude_db");
    bool has_kind_col = header.size() >= 3 && header[2] == "kind";
    if (header.size() > (has_kind_col ? 3u : 2u))
        throw IoError("line 1: unexpected extra header columns");

    Spectrum s;
    bool kind_set = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto tok = split_csv(line);
        size_t expect = has_kind_col ? 3 : 2;
        if (tok.size() != expect)
            throw IoError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(expect) + " columns");
        s.freq.push_back(parse_number(tok[0], line_no, "frequency"));
        s.amp.push_back(parse_number(tok[1], line_no, "amplitude"));
        if (has_kind_col) {
            SpectrumKind k;
            if (tok[2] == "S21") k = SpectrumKind::S21;
            else if (tok[2] == "S11") k = SpectrumKind::S11;
            else
                throw IoError("line " + std::to_string(line_no) +
                              ": kind must be S11 or S21");
            if (kind_set && k != s.kind)
                throw IoError("line " + std::to_string(line_no) +
                              ": mixed kind values in one file");
            s.kind = k;
            kind_set = true;
        }
    }
    if (s.freq.size() < 8) throw IoError("spectrum: needs at least 8 samples");

    bool sorted = true;
    for (size_t i = 1; i < s.freq.size(); ++i)
        if (s.freq[i] < s.freq[i - 1]) { sorted = false; break; }
    if (!sorted) {
        std::vector<size_t> idx(s.freq.size());
        std::iota(idx.begin(), idx.end(), 0u);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](size_t a, size_t b) { return s.freq[a] < s.freq[b]; });
        Spectrum t = s;
        for (size_t i = 0; i < idx.size(); ++i) {
            s.freq[i] = t.freq[idx[i]];
            s.amp[i] = t.amp[idx[i]];
        }
        s.sorted_on_load = true;
    }
    for (size_t i = 1; i < s.freq.size(); ++i)
        if (s.freq[i] == s.freq[i - 1])
            throw IoError("spectrum: non-monotonic frequency " + std::to_string(s.freq[i]));
    s.validate();
    return s;
}

RingdownTrace load_ringdown(std::istream& in) {
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) throw IoError("empty ringdown file");
    ++line_no;
    auto header = split_csv(line);
    if (header.size() != 2 || header[0] != "time_s" || header[1] != "voltage_v")
        throw IoError("line 1: expected header time_s,voltage_v");
    RingdownTrace r;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto tok = split_csv(line);
        if (tok.size() != 2)
            throw IoError("line " + std::to_string(line_no) + ": expected 2 columns");
        r.time.push_back(parse_number(tok[0], line_no, "time"));
        r.voltage.push_back(parse_number(tok[1], line_no, "voltage"));
    }
    r.validate();
    return r;
}

ResonancePoint find_resonance(const Spectrum& s) {
    s.validate();
    size_t n = s.size();
    size_t ix = 0;
    for (size_t i = 1; i < n; ++i) {
        bool better = (s.kind == SpectrumKind::S21) ? s.amp[i] > s.amp[ix]
                                                    : s.amp[i] < s.amp[ix];
        if (better) ix = i;
    }
    if (ix == 0 || ix == n - 1)
        throw FitError("resonance extremum lies at the spectrum edge");

    double x0 = s.freq[ix - 1], x1 = s.freq[ix], x2 = s.freq[ix + 1];
    double y0 = s.amp[ix - 1], y1 = s.amp[ix], y2 = s.amp[ix + 1];
    double d01 = (y1 - y0) / (x1 - x0);
    double d12 = (y2 - y1) / (x2 - x1);
    double curv = (d12 - d01) / (x2 - x0);
    if (!(std::fabs(curv) > 0.0)) return {x1, y1};
    double fv = 0.5 * (x0 + x1 - d01 / curv);
    if (fv < x0 || fv > x2) return {x1, y1};
    double pv = y0 + d01 * (fv - x0) + curv * (fv - x0) * (fv - x1);
    return {fv, pv};
}

double fwhm(const Spectrum& s, double f_r) {
    s.validate();
    ResonancePoint pk = find_resonance(s);
    bool peak_up = s.kind == SpectrumKind::S21;
    double level = peak_up ? pk.peak_db - 3.0 : pk.peak_db + 3.0;

    size_t n = s.size();
    size_t ic = 0;
    double best = std::fabs(s.freq[0] - f_r);
    for (size_t i = 1; i < n; ++i) {
        double d = std::fabs(s.freq[i] - f_r);
        if (d < best) { best = d; ic = i; }
    }
    auto inside = [&](double a) { return peak_up ? a > level : a < level; };
    if (!inside(s.amp[ic]))
        throw FitError("3 dB width: reference point below the half level");

    long jl = static_cast<long>(ic);
    while (jl >= 0 && inside(s.amp[static_cast<size_t>(jl)])) --jl;
    if (jl < 0) throw FitError("3 dB width: insufficient span on the low side");
    long jr = static_cast<long>(ic);
    while (jr < static_cast<long>(n) && inside(s.amp[static_cast<size_t>(jr)])) ++jr;
    if (jr >= static_cast<long>(n))
        throw FitError("3 dB width: insufficient span on the high side");

    auto cross = [&](size_t a, size_t b) {
        double t = (level - s.amp[a]) / (s.amp[b] - s.amp[a]);
        return s.freq[a] + t * (s.freq[b] - s.freq[a]);
    };
    double f_lo = cross(static_cast<size_t>(jl), static_cast<size_t>(jl) + 1);
    double f_hi = cross(static_cast<size_t>(jr) - 1, static_cast<size_t>(jr));
    return f_hi - f_lo;
}

double loaded_q(double f_r, double delta_f) {
    if (!(f_r > 0.0)) throw std::domain_error("loaded_q: f_r must be positive");
    if (!(delta_f > 0.0)) throw std::domain_error("loaded_q: width must be positive");
    return f_r / delta_f;
}

double intrinsic_q(double q_loaded, double beta1) {
    if (!(q_loaded > 0.0)) throw std::domain_error("intrinsic_q: Q_L must be positive");
    if (beta1 < 0.0) throw std::domain_error("intrinsic_q: beta1 must be nonnegative");
    return q_loaded * (1.0 + beta1);
}

double intrinsic_q(double q_loaded, double beta1, double beta2) {
    if (beta2 < 0.0) throw std::domain_error("intrinsic_q: beta2 must be nonnegative");
    return intrinsic_q(q_loaded, beta1) + q_loaded * beta2;
}

double coupling_from_powers(double p_f, double p_e) {
    if (!(p_f > 0.0) || !(p_e > 0.0))
        throw std::domain_error("coupling_from_powers: powers must be positive");
    double denom = 2.0 * std::sqrt(p_f / p_e) - 1.0;
    if (denom <= 0.0)
        throw std::domain_error("coupling_from_powers: power ratio out of model range");
    return 1.0 / denom;
}

double eq30_literal(double p_f, double p_e) {
    return coupling_from_powers(p_f, p_e);
}

RingdownFit fit_ringdown(const RingdownTrace& trace) {
    trace.validate();
    size_t n = trace.size();
    size_t imax = 0;
    for (size_t i = 1; i < n; ++i)
        if (trace.voltage[i] > trace.voltage[imax]) imax = i;

    size_t m = n - imax;
    if (m < 8) throw FitError("ringdown: decay segment too short");
    std::vector<double> t(m), v(m);
    for (size_t i = 0; i < m; ++i) {
        t[i] = trace.time[imax + i] - trace.time[imax];
        v[i] = trace.voltage[imax + i];
    }
    double span = t.back();

    size_t tail = std::max<size_t>(1, m / 10);
    double c = 0.0;
    for (size_t i = m - tail; i < m; ++i) c += v[i];
    c /= static_cast<double>(tail);
    double a = v[0] - c;
    double vscale = std::max(std::fabs(v[0]), std::fabs(c));
    if (!(a > 1e-12 * std::max(1.0, vscale)))
        throw FitError("ringdown: trace does not decay");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t cnt = 0;
    for (size_t i = 0; i < m / 2; ++i) {
        double d = v[i] - c;
        if (d <= 1e-6 * a) continue;
        double y = std::log(d);
        sx += t[i]; sy += y; sxx += t[i] * t[i]; sxy += t[i] * y;
        ++cnt;
    }
    double tau = span / 5.0;
    if (cnt >= 2) {
        double det = static_cast<double>(cnt) * sxx - sx * sx;
        if (det > 0.0) {
            double slope = (static_cast<double>(cnt) * sxy - sx * sy) / det;
            if (slope < 0.0) tau = -1.0 / slope;
        }
    }

    double lambda = 1e-3;
    double prev_ssr = -1.0;
    int iters = 0;
    for (; iters < 200; ++iters) {
        double jtj[4][4] = {{0}}, jtr[4] = {0};
        double ssr = 0.0;
        for (size_t i = 0; i < m; ++i) {
            double e = std::exp(-t[i] / tau);
            double model = a * e + c;
            double r = v[i] - model;
            ssr += r * r;
            double j[3] = {e, a * t[i] / (tau * tau) * e, 1.0};
            for (int p = 0; p < 3; ++p) {
                jtr[p] += j[p] * r;
                for (int q = 0; q < 3; ++q) jtj[p][q] += j[p] * j[q];
            }
        }
        if (prev_ssr >= 0.0) {
            double rel = std::fabs(prev_ssr - ssr) / std::max(prev_ssr, 1e-300);
            if (rel < 1e-14) break;
        }
        prev_ssr = ssr;

        bool stepped = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            double mtx[4][4], rhs[4], dx[4];
            for (int p = 0; p < 3; ++p) {
                rhs[p] = jtr[p];
                for (int q = 0; q < 3; ++q) mtx[p][q] = jtj[p][q];
                mtx[p][p] *= 1.0 + lambda;
            }
            if (!solve_dense(mtx, rhs, dx, 3)) { lambda *= 10.0; continue; }
            double na = a + dx[0], ntau = tau + dx[1], nc = c + dx[2];
            if (!(ntau > 0.0)) { lambda *= 10.0; continue; }
            double nssr = 0.0;
            for (size_t i = 0; i < m; ++i) {
                double r = v[i] - (na * std::exp(-t[i] / ntau) + nc);
                nssr += r * r;
            }
            if (nssr <= ssr) {
                double rel = std::max({std::fabs(dx[0]) / std::max(std::fabs(a), 1e-300),
                                       std::fabs(dx[1]) / std::max(std::fabs(tau), 1e-300),
                                       std::fabs(dx[2]) / std::max(std::fabs(c), 1e-12)});
                a = na; tau = ntau; c = nc;
                lambda = std::max(lambda * 0.1, 1e-12);
                stepped = true;
                if (rel < 1e-10) iters = 200;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
    }

    if (!(tau > 0.0)) throw FitError("ringdown: fitted decay time is not positive");
    if (tau > 100.0 * span)
        throw FitError("ringdown: fitted decay time exceeds the trace span");

    double ssr = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double r = v[i] - (a * std::exp(-t[i] / tau) + c);
        ssr += r * r;
    }
    RingdownFit out;
    out.tau = tau;
    out.amplitude = a;
    out.offset = c;
    out.rms_residual = std::sqrt(ssr / static_cast<double>(m));
    out.iterations = std::min(iters, 200);
    return out;
}

double q_from_ringdown(double f0, double tau_d, double beta) {
    if (!(f0 > 0.0)) throw std::domain_error("q_from_ringdown: f0 must be positive");
    if (!(tau_d > 0.0)) throw std::domain_error("q_from_ringdown: tau must be positive");
    if (beta < 0.0) throw std::domain_error("q_from_ringdown: beta must be nonnegative");
    return 2.0 * 3.14159265358979323846 * f0 * tau_d * (1.0 + beta);
}

LorentzianFit lorentzian_fit(const Spectrum& s) {
    s.validate();
    size_t n = s.size();
    std::vector<double> p(n);
    bool dip = s.kind == SpectrumKind::S11;
    for (size_t i = 0; i < n; ++i) p[i] = std::pow(10.0, s.amp[i] / 10.0);

    ResonancePoint pk = find_resonance(s);
    double fr = pk.f_r;
    double hw;
    try {
        hw = 0.5 * fwhm(s, fr);
    } catch (const FitError&) {
        hw = 0.1 * (s.freq.back() - s.freq.front());
    }
    size_t edge = std::max<size_t>(1, n / 20);
    double bg = 0.0;
    for (size_t i = 0; i < edge; ++i) bg += p[i] + p[n - 1 - i];
    bg /= static_cast<double>(2 * edge);
    double pext = std::pow(10.0, pk.peak_db / 10.0);
    double amp = pext - bg;
    if (dip == (amp > 0.0)) {
        // dips need a negative Lorentzian amplitude in linear power
        amp = dip ? -std::fabs(amp) : std::fabs(amp);
    }

    double lambda = 1e-3;
    double prev_ssr = -1.0;
    int iters = 0;
    for (; iters < 500; ++iters) {
        double jtj[4][4] = {{0}}, jtr[4] = {0};
        double ssr = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double df = s.freq[i] - fr;
            double den = df * df + hw * hw;
            double shape = hw * hw / den;
            double r = p[i] - (bg + amp * shape);
            ssr += r * r;
            double j[4];
            j[0] = amp * hw * hw * 2.0 * df / (den * den);   // d/d fr
            j[1] = amp * 2.0 * hw * df * df / (den * den);   // d/d hw
            j[2] = shape;                                    // d/d amp
            j[3] = 1.0;                                      // d/d bg
            for (int a2 = 0; a2 < 4; ++a2) {
                jtr[a2] += j[a2] * r;
                for (int b2 = 0; b2 < 4; ++b2) jtj[a2][b2] += j[a2] * j[b2];
            }
        }
        if (prev_ssr >= 0.0) {
            double rel = std::fabs(prev_ssr - ssr) / std::max(prev_ssr, 1e-300);
            if (rel < 1e-14) break;
        }
        prev_ssr = ssr;

        bool stepped = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            double mtx[4][4], rhs[4], dx[4];
            for (int a2 = 0; a2 < 4; ++a2) {
                rhs[a2] = jtr[a2];
                for (int b2 = 0; b2 < 4; ++b2) mtx[a2][b2] = jtj[a2][b2];
                mtx[a2][a2] *= 1.0 + lambda;
            }
            if (!solve_dense(mtx, rhs, dx, 4)) { lambda *= 10.0; continue; }
            double nfr = fr + dx[0], nhw = hw + dx[1];
            double namp = amp + dx[2], nbg = bg + dx[3];
            if (!(nhw > 0.0)) { lambda *= 10.0; continue; }
            double nssr = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double df = s.freq[i] - nfr;
                double den = df * df + nhw * nhw;
                double r = p[i] - (nbg + namp * nhw * nhw / den);
                nssr += r * r;
            }
            if (nssr <= ssr) {
                double rel = std::max(
                    {std::fabs(dx[0]) / std::max(std::fabs(fr), 1e-300),
                     std::fabs(dx[1]) / std::max(std::fabs(hw), 1e-300),
                     std::fabs(dx[2]) / std::max(std::fabs(amp), 1e-300),
                     std::fabs(dx[3]) / std::max(std::fabs(bg), 1e-12)});
                fr = nfr; hw = nhw; amp = namp; bg = nbg;
                lambda = std::max(lambda * 0.1, 1e-12);
                stepped = true;
                if (rel < 1e-12) iters = 500;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
    }

    if (!(hw > 0.0)) throw FitError("lorentzian: fitted width is not positive");
    double fmin = s.freq.front(), fmax = s.freq.back();
    if (fr < fmin || fr > fmax)
        throw FitError("lorentzian: fitted center left the spectrum window");
    if (2.0 * hw > 10.0 * (fmax - fmin))
        throw FitError("lorentzian: fitted width exceeds the spectrum window");

    double ssr = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double df = s.freq[i] - fr;
        double r = p[i] - (bg + amp * hw * hw / (df * df + hw * hw));
        ssr += r * r;
    }
    auto to_db = [](double lin) {
        return lin > 0.0 ? 10.0 * std::log10(lin) : -300.0;
    };
    LorentzianFit out;
    out.f_r = fr;
    out.fwhm = 2.0 * hw;
    out.peak_db = to_db(bg + amp);
    out.background_db = to_db(bg);
    out.rms_residual = std::sqrt(ssr / static_cast<double>(n));
    out.iterations = std::min(iters, 500);
    return out;
}

double simplified_q0(double geometry_factor, double surface_resistance) {
    if (!(surface_resistance > 0.0))
        throw std::domain_error("simplified_q0: surface resistance must be positive");
    return geometry_factor / surface_resistance;
}

std::string QReport::to_json() const {
    nlohmann::json j;
    j["f_r_hz"] = fmt_or_nan(f_r);
    j["fwhm_hz"] = fmt_or_nan(fwhm);
    j["q_loaded"] = fmt_or_nan(q_loaded);
    j["beta1"] = fmt_or_nan(beta1);
    if (has_beta2) j["beta2"] = fmt_or_nan(beta2);
    else j["beta2"] = nullptr;
    j["q0"] = fmt_or_nan(q0);
    j["method"] = to_string(method);
    return j.dump(2);
}

std::string QReport::to_csv_line() const {
    char buf[256];
    if (has_beta2)
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s",
                      f_r, fwhm, q_loaded, beta1, beta2, q0, to_string(method));
    else
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,,%.9g,%s",
                      f_r, fwhm, q_loaded, beta1, q0, to_string(method));
    return buf;
}

}  // namespace maglev
