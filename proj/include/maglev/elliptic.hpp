#pragma once

namespace maglev {

// Complete elliptic integrals in the modulus convention:
//   K(k) = \int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t)
//   E(k) = \int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt
// Evaluated by arithmetic-geometric mean iteration, absolute error < 1e-12.

// Valid for 0 <= k < 1; throws std::domain_error otherwise.
double elliptic_K(double k);

// Valid for 0 <= k <= 1; throws std::domain_error otherwise.
double elliptic_E(double k);

}  // namespace maglev
