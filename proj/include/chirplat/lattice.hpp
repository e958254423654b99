// lattice.hpp — direct site-space integration of the dimensionless driven
// lattice equation
//
//   i dpsi_n/dtau + (N^2 p2 / 4 pi^2)(psi_{n+1} + psi_{n-1} - 2 psi_n)
//                 + (N p3 |psi_n|^2 + drive_n(tau)) psi_n = 0
//
// with either periodic boundaries and a traveling-wave drive
//   drive_n = 2 p1 cos(2 pi n / N - theta_d),
// or zero boundaries (psi_0 = psi_{N-1} pinned to 0) and a standing drive
//   drive_n = 2 p1 cos(theta_d) cos(pi n / (N-1)).

#pragma once

#include <complex>
#include <vector>

#include "chirplat/params.hpp"
#include "chirplat/rk45.hpp"

namespace chirplat {

enum class Boundary { periodic, zero };
enum class Drive { traveling, standing };

struct LatticeState {
    std::vector<cxd> amplitudes;
    double tau = 0.0;

    int n_sites() const { return static_cast<int>(amplitudes.size()); }
};

inline double norm(const LatticeState& s) {
    double sum = 0.0;
    for (const cxd& a : s.amplitudes) sum += std::norm(a);
    return sum;
}

// Ground state of the periodic lattice: the uniform k=0 mode.
inline LatticeState uniform_ground_state(int n_sites) {
    LatticeState s;
    s.amplitudes.assign(static_cast<std::size_t>(n_sites),
                        cxd(1.0 / std::sqrt(static_cast<double>(n_sites)), 0.0));
    return s;
}

// Standing-wave eigenmode of the zero-boundary lattice at tau = 0:
//   psi_n = sqrt(2/(N-1)) sin(pi m n / (N-1)),  m = 1..N-2.
inline LatticeState standing_mode_state(int n_sites, int m) {
    if (m < 1 || m > n_sites - 2) throw ConfigError("standing mode index out of range");
    LatticeState s;
    s.amplitudes.resize(static_cast<std::size_t>(n_sites));
    const double km = pi * static_cast<double>(m) / (n_sites - 1);
    const double a = std::sqrt(2.0 / (n_sites - 1));
    for (int n = 0; n < n_sites; ++n) s.amplitudes[n] = cxd(a * std::sin(km * n), 0.0);
    s.amplitudes.front() = 0.0;
    s.amplitudes.back() = 0.0;
    return s;
}

inline void check_pairing(Boundary bc, Drive dk) {
    if (bc == Boundary::periodic && dk != Drive::traveling)
        throw ConfigError("periodic boundaries require the traveling-wave drive");
    if (bc == Boundary::zero && dk != Drive::standing)
        throw ConfigError("zero boundaries require the standing-wave drive");
}

// Time derivatives of the site amplitudes. For zero boundaries the pinned
// sites get exactly zero derivative. The drive kind is implied by the
// boundary kind (pairing enforced by the callers).
inline void site_derivatives(double tau, const std::vector<cxd>& psi, std::vector<cxd>& dpsi,
                             const DimensionlessParams& params, const DriveSchedule& drive,
                             Boundary bc) {
    const int n = static_cast<int>(psi.size());
    const double nn = static_cast<double>(n);
    const double hop = nn * nn * params.p2 / (4.0 * pi * pi);
    const double kerr = nn * params.p3;
    const double theta = drive.theta_d(tau);
    constexpr cxd iu(0.0, 1.0);

    if (bc == Boundary::periodic) {
        const double k0 = 2.0 * pi / nn;
        for (int j = 0; j < n; ++j) {
            const cxd& c = psi[j];
            const cxd lap = psi[(j + 1) % n] + psi[(j + n - 1) % n] - 2.0 * c;
            const double dr = 2.0 * params.p1 * std::cos(k0 * j - theta);
            dpsi[j] = iu * (hop * lap + (kerr * std::norm(c) + dr) * c);
        }
    } else {
        const double cs = 2.0 * params.p1 * std::cos(theta);
        dpsi[0] = 0.0;
        dpsi[n - 1] = 0.0;
        for (int j = 1; j < n - 1; ++j) {
            const cxd& c = psi[j];
            const cxd lap = psi[j + 1] + psi[j - 1] - 2.0 * c;
            const double dr = cs * std::cos(pi * static_cast<double>(j) / (nn - 1.0));
            dpsi[j] = iu * (hop * lap + (kerr * std::norm(c) + dr) * c);
        }
    }
}

inline std::vector<cxd> rhs_site(const LatticeState& s, const DimensionlessParams& params,
                                 const DriveSchedule& drive, Boundary bc, Drive dk) {
    check_pairing(bc, dk);
    std::vector<cxd> dpsi(s.amplitudes.size());
    site_derivatives(s.tau, s.amplitudes, dpsi, params, drive, bc);
    return dpsi;
}

// Integrates the lattice equation from state.tau to tau_end, returning states
// sampled every cfg.sample_every (endpoints always included).
inline std::vector<LatticeState> integrate_site(const LatticeState& state,
                                                const DimensionlessParams& params,
                                                const DriveSchedule& drive, Boundary bc, Drive dk,
                                                const IntegratorConfig& cfg, double tau_end) {
    check_pairing(bc, dk);
    params.validate();
    if (static_cast<int>(state.amplitudes.size()) != params.n_sites)
        throw ConfigError("state size does not match n_sites");
    if (bc == Boundary::zero &&
        (state.amplitudes.front() != cxd(0.0) || state.amplitudes.back() != cxd(0.0)))
        throw ConfigError("zero-boundary initial state must have psi_0 = psi_{N-1} = 0");

    std::vector<LatticeState> out;
    std::vector<cxd> y = state.amplitudes;
    auto rhs = [&](double tau, const std::vector<cxd>& psi, std::vector<cxd>& dpsi) {
        site_derivatives(tau, psi, dpsi, params, drive, bc);
    };
    integrate_adaptive<cxd>(rhs, y, state.tau, tau_end, cfg,
                            [&](double tau, const std::vector<cxd>& psi) {
                                out.push_back(LatticeState{psi, tau});
                            });
    return out;
}

}  // namespace chirplat
