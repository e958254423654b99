// modes.hpp — rotating-frame mode dynamics of the driven lattice.
//
// Lab-frame mode amplitudes a_l come from expanding psi_n over the traveling
// eigenmodes Psi_n^l = (1/sqrt N) exp(i k_l n - i omega_l tau). The rotating
// frame is b_l = a_l exp(i l theta_d - i omega_l tau - i 2 tau), in which the
// resonant mode equation reads
//
//   db_l/dtau = i [ (l omega_d - omega_l) b_l - p3 |b_l|^2 b_l
//                   + p1 (b_{l-1} + b_{l+1}) ],   b_{-1} = b_N = 0.
//
// The couplings between modes 0 and N-1 are dropped (nonresonant for tau > 0).
//
// integrate_modes solves exactly this system but propagates the variables
// y_l = b_l exp(-i(l theta_d - omega_l tau)) internally; the change of
// variables removes the large diagonal phase rates of empty far-off-resonance
// modes, so step size is set by the resonant dynamics alone. Results are
// mapped back to b_l at every sample.

#pragma once

#include <complex>
#include <vector>

#include "chirplat/lattice.hpp"
#include "chirplat/params.hpp"
#include "chirplat/rk45.hpp"

namespace chirplat {

enum class Frame { lab, rotating };

struct ModeState {
    std::vector<cxd> amplitudes;
    Frame frame = Frame::lab;
    double tau = 0.0;

    int n_modes() const { return static_cast<int>(amplitudes.size()); }
};

inline double norm(const ModeState& s) {
    double sum = 0.0;
    for (const cxd& a : s.amplitudes) sum += std::norm(a);
    return sum;
}

inline std::vector<double> populations(const ModeState& s) {
    std::vector<double> p(s.amplitudes.size());
    for (std::size_t l = 0; l < s.amplitudes.size(); ++l) p[l] = std::norm(s.amplitudes[l]);
    return p;
}

// Ground state: all population in mode 0 (frame-independent).
inline ModeState mode_ground_state(int n_sites, Frame frame = Frame::rotating) {
    ModeState m;
    m.amplitudes.assign(static_cast<std::size_t>(n_sites), cxd(0.0));
    m.amplitudes[0] = 1.0;
    m.frame = frame;
    return m;
}

// Phase of the rotating-frame transform: b_l = a_l exp(i phase_l).
inline double rotating_phase(int l, double tau, const DimensionlessParams& params,
                             const DriveSchedule& drive) {
    return static_cast<double>(l) * drive.theta_d(tau) - dispersion(l, params) * tau - 2.0 * tau;
}

// ----------------------- site <-> mode transforms ----------------------------

inline ModeState site_to_modes(const LatticeState& s, const DimensionlessParams& params,
                               const DriveSchedule& drive, Frame frame) {
    const int n = s.n_sites();
    ModeState m;
    m.amplitudes.assign(static_cast<std::size_t>(n), cxd(0.0));
    m.frame = frame;
    m.tau = s.tau;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int l = 0; l < n; ++l) {
        const double kl = 2.0 * pi * static_cast<double>(l) / n;
        const double wl = dispersion(l, params);
        cxd acc(0.0);
        for (int j = 0; j < n; ++j)
            acc += s.amplitudes[j] * std::polar(scale, -kl * static_cast<double>(j) + wl * s.tau);
        if (frame == Frame::rotating) acc *= std::polar(1.0, rotating_phase(l, s.tau, params, drive));
        m.amplitudes[l] = acc;
    }
    return m;
}

inline LatticeState modes_to_site(const ModeState& m, const DimensionlessParams& params,
                                  const DriveSchedule& drive) {
    const int n = m.n_modes();
    LatticeState s;
    s.amplitudes.assign(static_cast<std::size_t>(n), cxd(0.0));
    s.tau = m.tau;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int l = 0; l < n; ++l) {
        cxd al = m.amplitudes[l];
        if (m.frame == Frame::rotating)
            al *= std::polar(1.0, -rotating_phase(l, m.tau, params, drive));
        const double kl = 2.0 * pi * static_cast<double>(l) / n;
        const double wl = dispersion(l, params);
        for (int j = 0; j < n; ++j)
            s.amplitudes[j] += al * std::polar(scale, kl * static_cast<double>(j) - wl * m.tau);
    }
    return s;
}

inline ModeState to_frame(const ModeState& m, Frame frame, const DimensionlessParams& params,
                          const DriveSchedule& drive) {
    if (m.frame == frame) return m;
    ModeState out = m;
    out.frame = frame;
    const double sign = (frame == Frame::rotating) ? 1.0 : -1.0;
    for (int l = 0; l < m.n_modes(); ++l)
        out.amplitudes[l] *= std::polar(1.0, sign * rotating_phase(l, m.tau, params, drive));
    return out;
}

// --------------------------- rotating-frame RHS ------------------------------

inline std::vector<cxd> rhs_modes(const ModeState& m, const DimensionlessParams& params,
                                  const DriveSchedule& drive) {
    if (m.frame != Frame::rotating)
        throw ConfigError("rhs_modes requires a rotating-frame state");
    const int n = m.n_modes();
    const double wd = drive.omega_d(m.tau);
    std::vector<cxd> db(static_cast<std::size_t>(n));
    constexpr cxd iu(0.0, 1.0);
    for (int l = 0; l < n; ++l) {
        const cxd& b = m.amplitudes[l];
        const cxd lower = (l > 0) ? m.amplitudes[l - 1] : cxd(0.0);
        const cxd upper = (l < n - 1) ? m.amplitudes[l + 1] : cxd(0.0);
        db[l] = iu * ((static_cast<double>(l) * wd - dispersion(l, params)) * b -
                      params.p3 * std::norm(b) * b + params.p1 * (lower + upper));
    }
    return db;
}

// --------------------------- mode integration --------------------------------

// Solves the rotating-frame system from state.tau to tau_end; samples every
// cfg.sample_every. Input state may be in either frame.
inline std::vector<ModeState> integrate_modes(const ModeState& state,
                                              const DimensionlessParams& params,
                                              const DriveSchedule& drive,
                                              const IntegratorConfig& cfg, double tau_end) {
    params.validate();
    const int n = state.n_modes();
    if (n != params.n_sites) throw ConfigError("state size does not match n_sites");

    std::vector<double> omega(static_cast<std::size_t>(n));
    std::vector<double> domega(static_cast<std::size_t>(n));  // omega_l - omega_{l-1}
    for (int l = 0; l < n; ++l) omega[l] = dispersion(l, params);
    domega[0] = 0.0;
    for (int l = 1; l < n; ++l) domega[l] = omega[l] - omega[l - 1];

    // y_l = b_l exp(-i(l theta_d - omega_l tau)); the equation for y_l is the
    // lab-frame resonant system with explicit oscillatory couplings.
    auto b_to_y_phase = [&](int l, double tau) {
        return -(static_cast<double>(l) * drive.theta_d(tau) - omega[l] * tau);
    };

    ModeState rot = to_frame(state, Frame::rotating, params, drive);
    std::vector<cxd> y(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l)
        y[l] = rot.amplitudes[l] * std::polar(1.0, b_to_y_phase(l, state.tau));

    const double p1 = params.p1;
    const double p3 = params.p3;
    std::vector<cxd> hopping(static_cast<std::size_t>(n));  // e^{i(domega_l tau - theta_d)}
    auto rhs = [&](double tau, const std::vector<cxd>& yv, std::vector<cxd>& dy) {
        const double theta = drive.theta_d(tau);
        for (int l = 1; l < n; ++l) hopping[l] = std::polar(1.0, domega[l] * tau - theta);
        constexpr cxd iu(0.0, 1.0);
        for (int l = 0; l < n; ++l) {
            cxd coupling(0.0);
            if (l > 0) coupling += yv[l - 1] * hopping[l];
            if (l < n - 1) coupling += yv[l + 1] * std::conj(hopping[l + 1]);
            dy[l] = iu * (p1 * coupling - p3 * std::norm(yv[l]) * yv[l]);
        }
    };

    std::vector<ModeState> out;
    integrate_adaptive<cxd>(rhs, y, state.tau, tau_end, cfg,
                            [&](double tau, const std::vector<cxd>& yv) {
                                ModeState s;
                                s.amplitudes.resize(static_cast<std::size_t>(n));
                                for (int l = 0; l < n; ++l)
                                    s.amplitudes[l] =
                                        yv[l] * std::polar(1.0, -b_to_y_phase(l, tau));
                                s.frame = Frame::rotating;
                                s.tau = tau;
                                out.push_back(std::move(s));
                            });
    return out;
}

// ------------------------------ two-level engine ------------------------------

// Isolated crossing (l-1) <-> l of the rotating-frame ladder:
//   i d/dtau (b_lo, b_hi) = [[G_{l-1}, -p1], [-p1, G_l]] (b_lo, b_hi),
//   G_l = p3 |b_l|^2 - l omega_d(tau) + omega_l.
struct TwoLevelState {
    cxd b_lo{1.0, 0.0};
    cxd b_hi{0.0, 0.0};
    int l = 1;  // upper level index; 1 for the two-site lattice
    double tau = 0.0;

    double gamma_lo(const DimensionlessParams& params, const DriveSchedule& drive) const {
        return params.p3 * std::norm(b_lo) -
               static_cast<double>(l - 1) * drive.omega_d(tau) + dispersion(l - 1, params);
    }
    double gamma_hi(const DimensionlessParams& params, const DriveSchedule& drive) const {
        return params.p3 * std::norm(b_hi) - static_cast<double>(l) * drive.omega_d(tau) +
               dispersion(l, params);
    }
};

inline std::pair<cxd, cxd> rhs_two_level(const TwoLevelState& t, const DimensionlessParams& params,
                                         const DriveSchedule& drive) {
    constexpr cxd iu(0.0, 1.0);
    const double g_lo = t.gamma_lo(params, drive);
    const double g_hi = t.gamma_hi(params, drive);
    return {-iu * (g_lo * t.b_lo - params.p1 * t.b_hi),
            -iu * (-params.p1 * t.b_lo + g_hi * t.b_hi)};
}

inline std::vector<TwoLevelState> integrate_two_level(const TwoLevelState& state,
                                                      const DimensionlessParams& params,
                                                      const DriveSchedule& drive,
                                                      const IntegratorConfig& cfg,
                                                      double tau_end) {
    std::vector<cxd> y = {state.b_lo, state.b_hi};
    std::vector<TwoLevelState> out;
    auto rhs = [&](double tau, const std::vector<cxd>& v, std::vector<cxd>& dv) {
        TwoLevelState t{v[0], v[1], state.l, tau};
        auto [d_lo, d_hi] = rhs_two_level(t, params, drive);
        dv[0] = d_lo;
        dv[1] = d_hi;
    };
    integrate_adaptive<cxd>(rhs, y, state.tau, tau_end, cfg,
                            [&](double tau, const std::vector<cxd>& v) {
                                out.push_back(TwoLevelState{v[0], v[1], state.l, tau});
                            });
    return out;
}

// --------------------------- efficiency window -------------------------------

// Measurement window in mode index. Default covers the upper half of the
// resonantly accessible ladder, [ceil(N/8), floor(N/4)], clamped so it stays
// meaningful for small N.
struct EfficiencyWindow {
    int lo_mode = 1;
    int hi_mode = 1;

    static EfficiencyWindow default_for(int n_sites) {
        EfficiencyWindow w;
        w.lo_mode = std::max(1, (n_sites + 7) / 8);
        w.hi_mode = std::max(w.lo_mode, n_sites / 4);
        return w;
    }

    double k_lower_edge(int n_sites) const { return 2.0 * pi * lo_mode / n_sites; }

    void validate(int n_sites) const {
        if (lo_mode < 1 || hi_mode < lo_mode || hi_mode > n_sites / 2)
            throw ConfigError("efficiency window must satisfy 0 < lo <= hi <= N/2");
    }
};

inline double efficiency(const ModeState& m, const EfficiencyWindow& w) {
    double sum = 0.0;
    for (int l = w.lo_mode; l <= w.hi_mode && l < m.n_modes(); ++l)
        sum += std::norm(m.amplitudes[l]);
    return sum;
}

// Histogram presentation: modes l > N/2 are reported as l - N.
inline int shifted_mode_index(int l, int n_sites) {
    return (l > n_sites / 2) ? l - n_sites : l;
}

// -------------------- standing-wave (zero boundary) basis --------------------

// Dispersion of the zero-boundary lattice, k_m = pi m / (N-1), m = 1..N-2.
inline double standing_dispersion(int m, const DimensionlessParams& params) {
    if (m < 1 || m > params.n_sites - 2)
        throw std::out_of_range("standing_dispersion: mode index out of range");
    const double n = static_cast<double>(params.n_sites);
    const double s = std::sin(pi * static_cast<double>(m) / (2.0 * (n - 1.0)));
    return params.p2 * n * n / (pi * pi) * s * s;
}

// Crossing time of the standing ladder: tau_l = omega_l - omega_{l-1} for
// l >= 2 (the pathway starts from mode 1, so the first crossing is 1 <-> 2).
inline double standing_crossing_time(int l, const DimensionlessParams& params) {
    if (l < 2 || l > params.n_sites - 2)
        throw std::out_of_range("standing_crossing_time: transition index out of range");
    return standing_dispersion(l, params) - standing_dispersion(l - 1, params);
}

// Populations of the standing modes m = 1..N-2 (index 0 and N-1 unused,
// zero); the basis time phase drops out of the moduli.
inline std::vector<double> standing_mode_populations(const LatticeState& s) {
    const int n = s.n_sites();
    std::vector<double> pops(static_cast<std::size_t>(n), 0.0);
    const double a = std::sqrt(2.0 / (n - 1.0));
    for (int m = 1; m <= n - 2; ++m) {
        const double km = pi * static_cast<double>(m) / (n - 1.0);
        cxd acc(0.0);
        for (int j = 1; j < n - 1; ++j) acc += s.amplitudes[j] * (a * std::sin(km * j));
        pops[m] = std::norm(acc);
    }
    return pops;
}

}  // namespace chirplat
