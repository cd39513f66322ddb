#pragma once

// Slow but independent reference implementations used to pin expected
// values. None of these call into the library under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double whole, double tol, int depth) {
    double mid = 0.5 * (a + b);
    double left = simpson(f, a, mid);
    double right = simpson(f, mid, b);
    double delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("adaptive_simpson: depth exhausted");
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, mid, b, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    return adaptive_simpson(f, a, b, simpson(f, a, b), tol, 60);
}

// Complete elliptic integrals by quadrature over the trigonometric form.
inline double elliptic_k(double k) {
    double k2 = k * k;
    return integrate(
        [k2](double phi) {
            double s = std::sin(phi);
            return 1.0 / std::sqrt(1.0 - k2 * s * s);
        },
        0.0, 1.5707963267948966);
}

inline double elliptic_e(double k) {
    double k2 = k * k;
    return integrate(
        [k2](double phi) {
            double s = std::sin(phi);
            return std::sqrt(1.0 - k2 * s * s);
        },
        0.0, 1.5707963267948966);
}

// Per-amp field of a circular loop (radius a, plane z = 0) at (r, 0, h) by
// direct Biot-Savart line integration around the loop.
struct LoopField {
    double bz;
    double brho;
};

inline LoopField loop_field_biot_savart(double a, double r, double h) {
    const double pi = 3.14159265358979323846;
    const double mu0 = 4.0e-7 * pi;
    auto integrand_z = [&](double phi) {
        double dx = r - a * std::cos(phi);
        double dy = -a * std::sin(phi);
        double d2 = dx * dx + dy * dy + h * h;
        return a * (a - r * std::cos(phi)) / std::pow(d2, 1.5);
    };
    auto integrand_rho = [&](double phi) {
        double dx = r - a * std::cos(phi);
        double dy = -a * std::sin(phi);
        double d2 = dx * dx + dy * dy + h * h;
        return a * h * std::cos(phi) / std::pow(d2, 1.5);
    };
    // absolute tolerance scaled to the integrand magnitude; the raw
    // integrals here are O(1e3), far from unit scale
    auto scaled = [&](const std::function<double(double)>& f) {
        double coarse = std::fabs(simpson(f, 0.0, 2.0 * pi));
        double tol = 1e-11 * std::max(1.0, coarse);
        return integrate(f, 0.0, 2.0 * pi, tol);
    };
    LoopField f;
    f.bz = mu0 / (4.0 * pi) * scaled(integrand_z);
    f.brho = mu0 / (4.0 * pi) * scaled(integrand_rho);
    return f;
}

}  // namespace oracle
