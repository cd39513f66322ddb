#include "maglev/elliptic.hpp"

#include <cmath>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

namespace {
constexpr int kMaxIter = 64;
constexpr double kTol = 1e-16;
}  // namespace

double elliptic_K(double k) {
    if (!(k >= 0.0) || k >= 1.0)
        throw std::domain_error("elliptic_K: modulus must satisfy 0 <= k < 1");
    double a = 1.0;
    double b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < kMaxIter && std::fabs(a - b) > kTol * a; ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return PI / (2.0 * a);
}

double elliptic_E(double k) {
    if (!(k >= 0.0) || k > 1.0)
        throw std::domain_error("elliptic_E: modulus must satisfy 0 <= k <= 1");
    if (k == 1.0) return 1.0;
    double a = 1.0;
    double b = std::sqrt(1.0 - k * k);
    double c = k;
    double sum = 0.5 * c * c;
    double pow2 = 0.5;
    for (int i = 0; i < kMaxIter && std::fabs(c) > kTol; ++i) {
        c = 0.5 * (a - b);
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    return PI / (2.0 * a) * (1.0 - sum);
}

}  // namespace maglev
