// rays.hpp — semiclassical (eikonal) description of the continuum limit.
//
// Local dispersion relation along rays:
//   Omega(x, k, tau) = (p2 N^2 / pi^2) sin^2(k/2) - 2 p1 cos(Phi),
//   Phi = k0 x - theta_d(tau),  k0 = 2 pi / N.
// Ray equations (Omega is the Hamiltonian of the (x, k) flow):
//   dx/dtau = dOmega/dk,  dk/dtau = -dOmega/dx,
//   dOmega/dtau = partial Omega / partial tau,
//   dS/dtau = -Omega + k dOmega/dk.
// Reduced phase-locking system in the mismatch angle:
//   dPhi/dtau = (p2 N / pi) sin k - omega_d,
//   dk/dtau   = -(4 pi p1 / N) sin Phi.
// Eliminating k near resonance gives a tilted pendulum whose separatrix (when
// 4 p1 p2 cos k_r > 1) bounds the phase-locked trajectories; its geometry
// (Appendix-style shifted angle, lobe on [phi_turn, 0]) is computed here.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "chirplat/params.hpp"
#include "chirplat/rk45.hpp"

namespace chirplat {

// ------------------------------- ray flow ------------------------------------

struct RayState {
    double x = 0.0;        // continuous site coordinate
    double k = 0.0;        // local wavenumber, reported wrapped to (-pi, pi]
    double s = 0.0;        // eikonal phase S
    double omega = 0.0;    // local frequency Omega
    double b_amp = 1.0;    // slow amplitude, constant at this order
    double tau = 0.0;
};

inline double wrap_angle(double a) {
    a = std::fmod(a + pi, 2.0 * pi);
    if (a <= 0.0) a += 2.0 * pi;
    return a - pi;
}

inline double omega_local(double x, double k, double tau, const DimensionlessParams& params,
                          const DriveSchedule& drive) {
    const double n = static_cast<double>(params.n_sites);
    const double s = std::sin(0.5 * k);
    const double phi = params.k0() * x - drive.theta_d(tau);
    return params.p2 * n * n / (pi * pi) * s * s - 2.0 * params.p1 * std::cos(phi);
}

struct RayDerivatives {
    double dx, dk, domega, ds;
};

inline RayDerivatives ray_rhs(const RayState& r, double tau, const DimensionlessParams& params,
                              const DriveSchedule& drive) {
    const double n = static_cast<double>(params.n_sites);
    const double k0 = params.k0();
    const double phi = k0 * r.x - drive.theta_d(tau);
    const double domega_dk = params.p2 * n * n / (2.0 * pi * pi) * std::sin(r.k);
    RayDerivatives d;
    d.dx = domega_dk;
    d.dk = -2.0 * params.p1 * k0 * std::sin(phi);
    d.domega = -2.0 * params.p1 * drive.omega_d(tau) * std::sin(phi);
    d.ds = -r.omega + r.k * domega_dk;
    return d;
}

inline RayState make_ray(double x, double k, double tau, const DimensionlessParams& params,
                         const DriveSchedule& drive) {
    RayState r;
    r.x = x;
    r.k = wrap_angle(k);
    r.tau = tau;
    r.s = 0.0;
    r.omega = omega_local(x, r.k, tau, params, drive);
    return r;
}

inline std::vector<RayState> integrate_ray(const RayState& ray, const DimensionlessParams& params,
                                           const DriveSchedule& drive, const IntegratorConfig& cfg,
                                           double tau_end) {
    std::vector<double> y = {ray.x, ray.k, ray.omega, ray.s};
    std::vector<RayState> out;
    auto rhs = [&](double tau, const std::vector<double>& v, std::vector<double>& dv) {
        RayState r{v[0], v[1], v[3], v[2], ray.b_amp, tau};
        const RayDerivatives d = ray_rhs(r, tau, params, drive);
        dv[0] = d.dx;
        dv[1] = d.dk;
        dv[2] = d.domega;
        dv[3] = d.ds;
    };
    integrate_adaptive<double>(rhs, y, ray.tau, tau_end, cfg,
                               [&](double tau, const std::vector<double>& v) {
                                   out.push_back(RayState{v[0], v[1], v[3], v[2], ray.b_amp, tau});
                               });
    return out;
}

// --------------------------- reduced system -----------------------------------

// Phase mismatch Phi = k0 x - theta_d and wavenumber k. The p3 correction to
// dk/dtau is N p3 d(b^2)/dx, which vanishes for the constant-amplitude rays
// used here, so the reduced flow is p3-independent.
struct PendulumState {
    double phi = 0.0;
    double k = 0.0;
    double tau = 0.0;
};

inline std::pair<double, double> reduced_rhs(const PendulumState& p,
                                             const DimensionlessParams& params,
                                             const DriveSchedule& drive) {
    const double n = static_cast<double>(params.n_sites);
    const double dphi = params.p2 * n / pi * std::sin(p.k) - drive.omega_d(p.tau);
    const double dk = -4.0 * pi * params.p1 / n * std::sin(p.phi);
    return {dphi, dk};
}

inline std::vector<PendulumState> integrate_reduced(const PendulumState& state,
                                                    const DimensionlessParams& params,
                                                    const DriveSchedule& drive,
                                                    const IntegratorConfig& cfg, double tau_end) {
    std::vector<double> y = {state.phi, state.k};
    std::vector<PendulumState> out;
    auto rhs = [&](double tau, const std::vector<double>& v, std::vector<double>& dv) {
        auto [dphi, dk] = reduced_rhs(PendulumState{v[0], v[1], tau}, params, drive);
        dv[0] = dphi;
        dv[1] = dk;
    };
    integrate_adaptive<double>(rhs, y, state.tau, tau_end, cfg,
                               [&](double tau, const std::vector<double>& v) {
                                   out.push_back(PendulumState{v[0], v[1], tau});
                               });
    return out;
}

// Wavenumber satisfying the instantaneous resonance (p2 N / pi) sin k = omega_d;
// empty once the drive frequency passes the band edge.
inline std::optional<double> k_resonant(double tau, const DimensionlessParams& params,
                                        const DriveSchedule& drive) {
    const double arg = pi * drive.omega_d(tau) / (params.p2 * params.n_sites);
    if (std::abs(arg) > 1.0) return std::nullopt;
    return std::asin(arg);
}

// Sustained phase locking: over the final quarter of the trajectory, Phi stays
// inside a window narrower than 2 pi and k tracks the resonant wavenumber to
// within 0.2 rad.
inline bool detect_capture(const std::vector<PendulumState>& trajectory,
                           const DimensionlessParams& params, const DriveSchedule& drive) {
    if (trajectory.size() < 4) return false;
    const std::size_t start = trajectory.size() - trajectory.size() / 4;
    double phi_min = trajectory[start].phi, phi_max = trajectory[start].phi;
    for (std::size_t i = start; i < trajectory.size(); ++i) {
        const PendulumState& p = trajectory[i];
        phi_min = std::min(phi_min, p.phi);
        phi_max = std::max(phi_max, p.phi);
        const auto kr = k_resonant(p.tau, params, drive);
        if (!kr) return false;
        if (std::abs(p.k - *kr) > 0.2) return false;
    }
    return (phi_max - phi_min) < 2.0 * pi;
}

// --------------------------- separatrix geometry ------------------------------

// Tilted-pendulum separatrix in the shifted angle (Phi = 0 at the potential
// maximum; the bounded lobe sits on [phi_turn, 0]):
//   dPhi/dtau|sep(+-) = -+ sqrt(2 R(Phi)),  R(Phi) = B(1 - cos Phi) - sin Phi + Phi,
//   B = sqrt((4 p1 p2 cos k_r)^2 - 1).
struct SeparatrixGeometry {
    double b_param = 0.0;              // B
    double k_r = 0.0;                  // resonant wavenumber at tau
    double phi_turn = 0.0;             // lower root of the radicand, in (-2 pi, 0)
    double min_branch_velocity = 0.0;  // min over the lobe of dPhi/dtau|sep-
    std::optional<double> k_lower_edge;  // empty when arcsin argument is out of band
};

namespace detail {

inline double separatrix_radicand(double phi, double b) {
    return b * (1.0 - std::cos(phi)) - std::sin(phi) + phi;
}

}  // namespace detail

inline std::optional<SeparatrixGeometry> separatrix_geometry(const DimensionlessParams& params,
                                                             double tau,
                                                             const DriveSchedule& drive) {
    const auto kr = k_resonant(tau, params, drive);
    if (!kr) return std::nullopt;
    const double a = 4.0 * params.p1 * params.p2 * std::cos(*kr);
    if (!(a > 1.0)) return std::nullopt;

    SeparatrixGeometry g;
    g.k_r = *kr;
    g.b_param = std::sqrt(a * a - 1.0);

    // The radicand has a double root at 0 and one sign change in (-2 pi, 0).
    // Scan for it, then bisect.
    auto rad = [&](double phi) { return detail::separatrix_radicand(phi, g.b_param); };
    const double scan_step = 1e-3;
    double hi = -scan_step;
    double lo = hi;
    while (lo > -2.0 * pi && rad(lo) > 0.0) {
        hi = lo;
        lo -= scan_step;
    }
    if (rad(lo) > 0.0) {
        // Numerically the lobe extends all the way to -2 pi (large-B limit).
        g.phi_turn = -2.0 * pi;
    } else {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rad(mid) > 0.0 ? hi : lo) = mid;
        }
        g.phi_turn = 0.5 * (lo + hi);
    }

    // Maximize the radicand over the lobe (golden-section); the most negative
    // branch velocity is -sqrt(2 max R).
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double xa = g.phi_turn, xb = 0.0;
    double x1 = xb - gr * (xb - xa);
    double x2 = xa + gr * (xb - xa);
    double f1 = rad(x1), f2 = rad(x2);
    while (xb - xa > 1e-8) {
        if (f1 > f2) {
            xb = x2;
            x2 = x1;
            f2 = f1;
            x1 = xb - gr * (xb - xa);
            f1 = rad(x1);
        } else {
            xa = x1;
            x1 = x2;
            f1 = f2;
            x2 = xa + gr * (xb - xa);
            f2 = rad(x2);
        }
    }
    const double r_max = std::max(rad(0.5 * (xa + xb)), 0.0);
    g.min_branch_velocity = -std::sqrt(2.0 * r_max);

    const double arg =
        (g.min_branch_velocity + drive.omega_d(tau)) * pi / (params.p2 * params.n_sites);
    if (arg >= -1.0 && arg <= 1.0) g.k_lower_edge = std::asin(arg);
    return g;
}

// Locus in (p1, p2) where the separatrix lower edge in k at tau_f sits exactly
// at the measurement-window edge. Points where the separatrix does not exist
// (or its edge falls out of band) count as below the window, so the root
// found is the first p2 at which the geometry clears the window edge; in the
// regime-map parameter range this coincides with the existence boundary
// 4 p1 p2 cos k_r(tau_f) = 1. tau_f scales with p2 as tau_f = tau_factor * p2.
inline double separatrix_boundary_p2(double p1, const DimensionlessParams& proto,
                                     const DriveSchedule& drive, double tau_factor,
                                     double k_edge = pi / 4.0) {
    if (!(p1 > 0.0)) throw ConfigError("separatrix_boundary_p2 requires p1 > 0");
    DimensionlessParams params = proto;
    params.p1 = p1;

    auto edge_gap = [&](double p2) {
        params.p2 = p2;
        const auto g = separatrix_geometry(params, tau_factor * p2, drive);
        if (!g || !g->k_lower_edge) return -1.0;
        return *g->k_lower_edge - k_edge;
    };

    double lo = 1e-4, hi = 1e-4;
    while (edge_gap(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e6)
            throw NumericError("separatrix_boundary_p2: no separatrix up to p2 = 1e6");
    }
    if (hi > 1e-4) lo = hi / 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (edge_gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace chirplat
