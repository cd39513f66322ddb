#include "maglev/levitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "maglev/constants.hpp"
#include "maglev/elliptic.hpp"

namespace maglev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// reference moment: 1.44 T disc of radius 0.5 mm, half thickness 0.25 mm
double reference_moment() {
    static const double m_ref = 1.44 * PI * 0.25e-6 * 0.5e-3 / MU0;
    return m_ref;
}

// everything the energy kernel needs, resolved once per (magnet, geom, cfg)
struct EnergyParams {
    double r_s = 0.0;
    double d = 0.0;        // wall distance
    double r_c = 0.0;      // for stability labels
    double weight = 0.0;   // M g
    double lam = 0.0;      // effective axial response stiffness
    double eta = 0.0;      // effective transverse response stiffness
    double km = 0.0;       // mu0 m^2 / (64 pi)
    double ct = 1.0, st = 0.0;
    double fw = 1.0;       // wall image factor 1 + sin^2 theta
    double moment = 0.0;
    double current = 0.0;
    ResponseMode mode = ResponseMode::induced;
};

double effective_theta(const MagnetSpec& magnet, const Position& pos,
                       const LevitationConfig& cfg) {
    if (cfg.radial_polarization) return 0.5 * PI;
    return magnet.theta + pos.theta;
}

EnergyParams make_params(const MagnetSpec& magnet, const CavityGeometry& geom,
                         const Position& pos, const LevitationConfig& cfg) {
    EnergyParams p;
    p.r_s = geom.r_s;
    p.d = cfg.wall_distance > 0.0 ? cfg.wall_distance : geom.r_c;
    p.r_c = geom.r_c;
    p.weight = mass(magnet) * G_STD;
    p.moment = dipole_moment(magnet);
    p.mode = cfg.mode;
    p.current = cfg.current >= 0.0 ? cfg.current
                                   : p.moment / (PI * geom.r_s * geom.r_s);

    const double m_ref = reference_moment();
    const double mc = cfg.saturation_ratio * m_ref;
    const double msat = mc * std::tanh(p.moment / mc);
    const double msat_ref = mc * std::tanh(m_ref / mc);
    double coupling = cfg.calibration * (msat / msat_ref) * (msat / msat_ref);
    if (cfg.radial_polarization) coupling *= cfg.radial_coupling;
    p.lam = cfg.axial_response * coupling;
    p.eta = cfg.transverse_response * coupling;

    p.km = MU0 * p.moment * p.moment / (64.0 * PI);
    const double theta = effective_theta(magnet, pos, cfg);
    p.ct = std::cos(theta);
    p.st = std::sin(theta);
    p.fw = 1.0 + p.st * p.st;
    return p;
}

double response_energy(const EnergyParams& p, double x, double z) {
    const RingField f = loop_unit_field(p.r_s, x, z);
    const double proj = p.ct * f.bz + p.st * f.brho;
    const double orth = p.st * f.bz - p.ct * f.brho;
    return p.lam * proj * proj + p.eta * orth * orth;
}

double fixed_current_energy(const EnergyParams& p, double x, double z) {
    const RingField f = loop_unit_field(p.r_s, x, z);
    const double proj = p.ct * f.bz + p.st * f.brho;
    return p.current * p.moment * proj;
}

double wall_energy(const EnergyParams& p, double x) {
    const double dx = p.d - x;
    return p.km * p.fw / (dx * dx * dx);
}

// bounded kernel for the minimizer: +inf outside the admissible box
double bounded_energy(const EnergyParams& p, double x, double z) {
    if (x < 0.0 || x > p.d - 2e-5 || z < 1e-5 || z > 60e-3) return kInf;
    return response_energy(p, x, z) + wall_energy(p, x) + p.weight * z;
}

struct Candidate {
    double x = 0.0, z = 0.0, u = kInf;
};

// central-difference gradient with one-sided fallback at the box edge
void bounded_gradient(const EnergyParams& p, double x, double z, double h,
                      double& gx, double& gz) {
    const double u0 = bounded_energy(p, x, z);
    const double uxp = bounded_energy(p, x + h, z);
    const double uxm = bounded_energy(p, x - h, z);
    const double uzp = bounded_energy(p, x, z + h);
    const double uzm = bounded_energy(p, x, z - h);
    gx = std::isfinite(uxm) && std::isfinite(uxp) ? (uxp - uxm) / (2.0 * h)
         : std::isfinite(uxp)                     ? (uxp - u0) / h
                                                  : (u0 - uxm) / h;
    gz = std::isfinite(uzm) && std::isfinite(uzp) ? (uzp - uzm) / (2.0 * h)
         : std::isfinite(uzp)                     ? (uzp - u0) / h
                                                  : (u0 - uzm) / h;
}

// 2x2 numerical Hessian; probes shrink toward the interior at the box edge
void bounded_hessian(const EnergyParams& p, double x, double z, double h,
                     double& hxx, double& hzz, double& hxz) {
    auto U = [&](double a, double b) { return bounded_energy(p, a, b); };
    const double u0 = U(x, z);
    double uxp = U(x + h, z), uxm = U(x - h, z);
    double uzp = U(x, z + h), uzm = U(x, z - h);
    if (!std::isfinite(uxm)) uxm = uxp;
    if (!std::isfinite(uxp)) uxp = uxm;
    if (!std::isfinite(uzm)) uzm = uzp;
    if (!std::isfinite(uzp)) uzp = uzm;
    hxx = (uxp - 2.0 * u0 + uxm) / (h * h);
    hzz = (uzp - 2.0 * u0 + uzm) / (h * h);
    double upp = U(x + h, z + h), upm = U(x + h, z - h);
    double ump = U(x - h, z + h), umm = U(x - h, z - h);
    if (std::isfinite(upp) && std::isfinite(upm) && std::isfinite(ump) && std::isfinite(umm)) {
        hxz = (upp - upm - ump + umm) / (4.0 * h * h);
    } else {
        hxz = 0.0;
    }
}

void eigen2x2(double hxx, double hzz, double hxz, double& lo, double& hi) {
    const double tr = hxx + hzz;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (hxx - hzz) * (hxx - hzz) + hxz * hxz));
    lo = 0.5 * tr - disc;
    hi = 0.5 * tr + disc;
}

// stage 1: coordinate descent with shrinking step, terminating when the
// step falls below 1 um or the improvement below 1e-15 J
Candidate coordinate_descent(const EnergyParams& p, Candidate c, double step0) {
    double step = step0;
    while (step >= 1e-6) {
        for (;;) {
            double best = c.u;
            int dir = -1;
            const double ux_p = bounded_energy(p, c.x + step, c.z);
            const double ux_m = bounded_energy(p, c.x - step, c.z);
            const double uz_p = bounded_energy(p, c.x, c.z + step);
            const double uz_m = bounded_energy(p, c.x, c.z - step);
            if (ux_p < best) { best = ux_p; dir = 0; }
            if (ux_m < best) { best = ux_m; dir = 1; }
            if (uz_p < best) { best = uz_p; dir = 2; }
            if (uz_m < best) { best = uz_m; dir = 3; }
            if (dir < 0 || c.u - best < 1e-15) break;
            switch (dir) {
                case 0: c.x += step; break;
                case 1: c.x -= step; break;
                case 2: c.z += step; break;
                case 3: c.z -= step; break;
            }
            c.u = best;
        }
        step *= 0.5;
    }
    return c;
}

// stage 2: safeguarded Newton polish on the numerical Hessian, driving the
// gradient to zero inside narrow energy valleys where axis-aligned steps
// stall
Candidate newton_polish(const EnergyParams& p, Candidate c) {
    constexpr double grad_h = 1e-7;
    constexpr double hess_h = 5e-7;
    constexpr double trust = 5e-5;
    for (int it = 0; it < 80; ++it) {
        double gx, gz;
        bounded_gradient(p, c.x, c.z, grad_h, gx, gz);
        const double gnorm = std::hypot(gx, gz);
        if (gnorm < 1e-10) break;
        double hxx, hzz, hxz;
        bounded_hessian(p, c.x, c.z, hess_h, hxx, hzz, hxz);
        double lo, hi;
        eigen2x2(hxx, hzz, hxz, lo, hi);
        const double floor_ev = std::max(1e-6 * std::fabs(hi), 1e-9);
        // eigenvector of the low eigenvalue
        double vx, vz;
        if (std::fabs(hxz) > 1e-300) {
            vx = lo - hzz;
            vz = hxz;
        } else if (hxx <= hzz) {
            vx = 1.0;
            vz = 0.0;
        } else {
            vx = 0.0;
            vz = 1.0;
        }
        const double vn = std::hypot(vx, vz);
        vx /= vn;
        vz /= vn;
        const double lo_s = std::max(lo, floor_ev);
        const double hi_s = std::max(hi, floor_ev);
        // g decomposed on the eigenbasis {v (low), w (high)}
        const double wx = -vz, wz = vx;
        const double gv = gx * vx + gz * vz;
        const double gw = gx * wx + gz * wz;
        double sx = -(gv / lo_s) * vx - (gw / hi_s) * wx;
        double sz = -(gv / lo_s) * vz - (gw / hi_s) * wz;
        const double sn = std::hypot(sx, sz);
        if (sn < 1e-13) break;
        if (sn > trust) {
            sx *= trust / sn;
            sz *= trust / sn;
        }
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            const double ut = bounded_energy(p, c.x + t * sx, c.z + t * sz);
            if (ut < c.u) {
                c.x += t * sx;
                c.z += t * sz;
                c.u = ut;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    return c;
}

Candidate refine_candidate(const EnergyParams& p, double x, double z, double step0) {
    Candidate c{x, z, bounded_energy(p, x, z)};
    c = coordinate_descent(p, c, step0);
    c = newton_polish(p, c);
    return c;
}

StabilityLabel label_for(const EnergyParams& p, double x) {
    if (x <= p.r_s) return StabilityLabel::stable_on_stub;
    return StabilityLabel::falls_into_gap;
}

EquilibriumResult package(const EnergyParams& p, const Candidate& c, double theta,
                          int candidates) {
    EquilibriumResult r;
    r.found = true;
    r.position = Position{c.x, c.z, theta};
    r.u_min = c.u;
    r.label = label_for(p, c.x);
    double hxx, hzz, hxz;
    bounded_hessian(p, c.x, c.z, 1e-6, hxx, hzz, hxz);
    eigen2x2(hxx, hzz, hxz, r.hessian_eig_lo, r.hessian_eig_hi);
    r.candidates = candidates;
    return r;
}

}  // namespace

const char* to_string(StabilityLabel label) {
    switch (label) {
        case StabilityLabel::stable_on_stub: return "stable_on_stub";
        case StabilityLabel::falls_into_gap: return "falls_into_gap";
        case StabilityLabel::no_levitated_minimum: return "no_levitated_minimum";
    }
    return "unknown";
}

RingField loop_unit_field(double a, double r, double h) {
    const double rr = std::fabs(r);
    const double sum = (a + rr) * (a + rr) + h * h;
    const double dif = (a - rr) * (a - rr) + h * h;
    if (dif == 0.0)
        throw std::domain_error("loop_unit_field: singular at the loop filament");
    const double root = std::sqrt(sum);
    const double k = std::sqrt(4.0 * a * rr / sum);
    const double K = elliptic_K(k);
    const double E = elliptic_E(k);
    RingField f;
    f.bz = MU0 / (2.0 * PI * root) *
           (((a * a - rr * rr - h * h) / dif) * E + K);
    if (rr < 1e-12) {
        f.brho = 0.0;
    } else {
        f.brho = MU0 * h / (2.0 * PI * rr * root) *
                 (((a * a + rr * rr + h * h) / dif) * E - K);
        if (r < 0.0) f.brho = -f.brho;
    }
    return f;
}

double two_loop_energy(const MagnetSpec& magnet, const CavityGeometry& geom,
                       const Position& pos, const LevitationConfig& cfg) {
    if (!(pos.z > 0.0))
        throw std::domain_error("two_loop_energy: height must be > 0");
    const EnergyParams p = make_params(magnet, geom, pos, cfg);
    if (cfg.mode == ResponseMode::fixed_current)
        return fixed_current_energy(p, pos.x, pos.z);
    return response_energy(p, pos.x, pos.z);
}

double mirror_energy(const MagnetSpec& magnet, const Position& pos,
                     const LevitationConfig& cfg) {
    const double d = cfg.wall_distance;
    if (!(d > 0.0))
        throw std::invalid_argument("mirror_energy: wall_distance not set");
    if (pos.x >= d)
        throw std::domain_error("mirror_energy: diverges at x >= wall distance");
    const double m = dipole_moment(magnet);
    const double st = std::sin(effective_theta(magnet, pos, cfg));
    const double dx = d - pos.x;
    return MU0 * m * m * (1.0 + st * st) / (64.0 * PI * dx * dx * dx);
}

double gravitational_energy(const MagnetSpec& magnet, const Position& pos) {
    return mass(magnet) * G_STD * pos.z;
}

double total_energy(const MagnetSpec& magnet, const CavityGeometry& geom,
                    const Position& pos, const LevitationConfig& cfg) {
    LevitationConfig cfg_wall = cfg;
    if (!(cfg_wall.wall_distance > 0.0)) cfg_wall.wall_distance = geom.r_c;
    return two_loop_energy(magnet, geom, pos, cfg_wall) +
           mirror_energy(magnet, pos, cfg_wall) + gravitational_energy(magnet, pos);
}

EnergyLandscape energy_landscape(const MagnetSpec& magnet, const CavityGeometry& geom,
                                 const LevitationConfig& cfg, const GridSpec& grid) {
    if (grid.nx < 1 || grid.nz < 1)
        throw std::invalid_argument("energy_landscape: empty grid");
    if (grid.nx > 1 && !(grid.x1 > grid.x0))
        throw std::invalid_argument("energy_landscape: x axis not increasing");
    if (grid.nz > 1 && !(grid.z1 > grid.z0))
        throw std::invalid_argument("energy_landscape: z axis not increasing");

    Position pos{0.0, 0.0, 0.0};
    const EnergyParams p = make_params(magnet, geom, pos, cfg);

    EnergyLandscape ls;
    ls.xs.resize(grid.nx);
    ls.zs.resize(grid.nz);
    for (int i = 0; i < grid.nx; ++i)
        ls.xs[i] = grid.nx == 1 ? grid.x0
                                : grid.x0 + (grid.x1 - grid.x0) * i / (grid.nx - 1);
    for (int j = 0; j < grid.nz; ++j)
        ls.zs[j] = grid.nz == 1 ? grid.z0
                                : grid.z0 + (grid.z1 - grid.z0) * j / (grid.nz - 1);
    ls.u.assign(static_cast<size_t>(grid.nx) * grid.nz, kNan);

    for (int i = 0; i < grid.nx; ++i) {
        const double x = ls.xs[i];
        for (int j = 0; j < grid.nz; ++j) {
            const double z = ls.zs[j];
            // nodes next to the singular boundaries are excluded, not evaluated
            if (x < 0.0 || z < 1e-5 || x > p.d - 1e-5) {
                ++ls.excluded;
                continue;
            }
            ls.u[static_cast<size_t>(i) * grid.nz + j] =
                response_energy(p, x, z) + wall_energy(p, x) + p.weight * z;
        }
    }
    return ls;
}

void write_landscape_gnuplot(const EnergyLandscape& ls, std::ostream& out) {
    for (size_t i = 0; i < ls.xs.size(); ++i) {
        for (size_t j = 0; j < ls.zs.size(); ++j)
            out << ls.xs[i] << ' ' << ls.zs[j] << ' ' << ls.u[i * ls.zs.size() + j] << '\n';
        if (i + 1 < ls.xs.size()) out << '\n';
    }
}

void write_landscape_csv(const EnergyLandscape& ls, std::ostream& out) {
    out << "x_m,z_m,U_J\n";
    for (size_t i = 0; i < ls.xs.size(); ++i)
        for (size_t j = 0; j < ls.zs.size(); ++j)
            out << ls.xs[i] << ',' << ls.zs[j] << ',' << ls.u[i * ls.zs.size() + j] << '\n';
}

EquilibriumResult refine_equilibrium(const MagnetSpec& magnet, const CavityGeometry& geom,
                                     const LevitationConfig& cfg, const Position& start) {
    const EnergyParams p = make_params(magnet, geom, start, cfg);
    const Candidate c = refine_candidate(p, start.x, start.z, 2.5e-4);
    if (!std::isfinite(c.u)) {
        EquilibriumResult r;
        r.found = false;
        r.label = StabilityLabel::no_levitated_minimum;
        return r;
    }
    return package(p, c, effective_theta(magnet, start, cfg), 1);
}

std::vector<EquilibriumResult> refined_minima(const MagnetSpec& magnet,
                                              const CavityGeometry& geom,
                                              const LevitationConfig& cfg,
                                              const FindOptions& opts) {
    magnet.validate();
    geom.validate();
    if (opts.nx < 3 || opts.nz < 3)
        throw std::invalid_argument("refined_minima: grid too small");

    Position pos{0.0, 0.0, 0.0};
    const EnergyParams p = make_params(magnet, geom, pos, cfg);

    const int nx = opts.nx, nz = opts.nz;
    const double dx = p.d / nx;
    const double dz = opts.z_max / nz;
    std::vector<double> xs(nx), zs(nz);
    for (int i = 0; i < nx; ++i) xs[i] = i * dx;
    for (int j = 0; j < nz; ++j) zs[j] = (j + 1) * dz;

    std::vector<double> u(static_cast<size_t>(nx) * nz);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nz; ++j)
            u[static_cast<size_t>(i) * nz + j] = bounded_energy(p, xs[i], zs[j]);

    auto at = [&](int i, int j) { return u[static_cast<size_t>(i) * nz + j]; };

    // strict local minima over the clamped 3x3 neighborhood seed the refiner
    std::vector<Candidate> seeds;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nz; ++j) {
            const double uc = at(i, j);
            if (!std::isfinite(uc)) continue;
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = std::clamp(i + di, 0, nx - 1);
                    const int jj = std::clamp(j + dj, 0, nz - 1);
                    if (ii == i && jj == j) continue;
                    if (!(uc < at(ii, jj))) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) seeds.push_back({xs[i], zs[j], uc});
        }
    }

    const double step0 = 0.25 * std::max(dx, dz);
    std::vector<Candidate> refined;
    refined.reserve(seeds.size());
    for (const auto& s : seeds) refined.push_back(refine_candidate(p, s.x, s.z, step0));

    std::sort(refined.begin(), refined.end(),
              [](const Candidate& a, const Candidate& b) { return a.u < b.u; });
    std::vector<Candidate> kept;
    for (const auto& c : refined) {
        bool dup = false;
        for (const auto& k : kept)
            if (std::hypot(c.x - k.x, c.z - k.z) < 5e-5) {
                dup = true;
                break;
            }
        if (!dup) kept.push_back(c);
    }

    std::vector<EquilibriumResult> out;
    out.reserve(kept.size());
    for (const auto& c : kept)
        out.push_back(package(p, c, effective_theta(magnet, pos, cfg),
                              static_cast<int>(kept.size())));
    return out;
}

EquilibriumResult find_equilibrium(const MagnetSpec& magnet, const CavityGeometry& geom,
                                   const LevitationConfig& cfg, const FindOptions& opts) {
    const std::vector<EquilibriumResult> minima = refined_minima(magnet, geom, cfg, opts);
    if (minima.empty()) {
        EquilibriumResult r;
        r.found = false;
        r.label = StabilityLabel::no_levitated_minimum;
        return r;
    }
    return minima.front();
}

}  // namespace maglev
