// params.hpp — model parametrization for the chirped parametrically driven
// discrete nonlinear Schrodinger lattice.
//
// All dynamics code works with the dimensionless triple (p1, p2, p3):
//   p1 = epsilon / (2 sqrt(alpha))           drive strength
//   p2 = 4 pi^2 / (delta^2 N^2 sqrt(alpha))  dispersion strength
//   p3 = beta / (N sqrt(alpha))              Kerr-type nonlinearity
// together with the lattice size N. Physical parameters exist only as the
// conversion entry point.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace chirplat {

inline constexpr double pi = std::numbers::pi_v<double>;

using cxd = std::complex<double>;

// ----------------------------- error types ----------------------------------

// Invalid user input (parameters, configuration). CLI maps this to exit 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during a run. CLI maps this to exit 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------ parameters ----------------------------------

struct PhysicalParams {
    double epsilon = 0.0;  // drive strength, >= 0
    double alpha = 1.0;    // chirp rate, > 0
    double delta = 1.0;    // lattice spacing, > 0
    double beta = 0.0;     // Kerr coefficient, >= 0
    int n_sites = 2;
};

struct DimensionlessParams {
    double p1 = 0.0;
    double p2 = 1.0;
    double p3 = 0.0;
    int n_sites = 2;

    double k0() const { return 2.0 * pi / n_sites; }

    void validate() const {
        if (n_sites < 2) throw ConfigError("n_sites must be >= 2");
        if (!(p2 > 0.0)) throw ConfigError("p2 must be > 0");
        if (p1 < 0.0 || p3 < 0.0) throw ConfigError("p1 and p3 must be >= 0");
    }
};

inline DimensionlessParams to_dimensionless(const PhysicalParams& p) {
    if (!(p.alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(p.delta > 0.0)) throw ConfigError("delta must be > 0");
    if (p.n_sites < 2) throw ConfigError("n_sites must be >= 2");
    if (p.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
    if (p.beta < 0.0) throw ConfigError("beta must be >= 0");
    const double sqrt_alpha = std::sqrt(p.alpha);
    const double n = static_cast<double>(p.n_sites);
    DimensionlessParams d;
    d.p1 = p.epsilon / (2.0 * sqrt_alpha);
    d.p2 = 4.0 * pi * pi / (p.delta * p.delta * n * n * sqrt_alpha);
    d.p3 = p.beta / (n * sqrt_alpha);
    d.n_sites = p.n_sites;
    return d;
}

// ------------------------------ drive schedule -------------------------------

// Pluggable drive phase theta_d(tau) and its exact derivative omega_d(tau).
// Default is the quadratic chirp theta_d = tau^2/2, omega_d = tau.
struct DriveSchedule {
    std::function<double(double)> theta_d;
    std::function<double(double)> omega_d;

    static DriveSchedule quadratic_chirp() {
        DriveSchedule d;
        d.theta_d = [](double tau) { return 0.5 * tau * tau; };
        d.omega_d = [](double tau) { return tau; };
        return d;
    }
};

// ------------------------------ linear modes ---------------------------------

// Dimensionless dispersion of the periodic lattice:
//   omega_l = (p2 N^2 / pi^2) sin^2(pi l / N),  l = 0..N-1.
inline double dispersion(int l, const DimensionlessParams& params) {
    if (l < 0 || l >= params.n_sites)
        throw std::out_of_range("dispersion: mode index " + std::to_string(l) +
                                " out of range for N=" + std::to_string(params.n_sites));
    const double n = static_cast<double>(params.n_sites);
    const double s = std::sin(pi * static_cast<double>(l) / n);
    return params.p2 * n * n / (pi * pi) * s * s;
}

struct LinearMode {
    int index = 0;
    double k = 0.0;              // wavenumber 2 pi m / N
    double omega = 0.0;          // dimensionless frequency
    double delta_omega = 0.0;    // omega_m - omega_{m-1} (0 for m = 0)
};

inline LinearMode linear_mode(int m, const DimensionlessParams& params) {
    LinearMode mode;
    mode.index = m;
    mode.k = 2.0 * pi * static_cast<double>(m) / params.n_sites;
    mode.omega = dispersion(m, params);
    mode.delta_omega = (m > 0) ? mode.omega - dispersion(m - 1, params) : 0.0;
    return mode;
}

// -------------------------- crossing schedule --------------------------------

// Time of the two-level energy crossing (l-1) <-> l under the quadratic chirp:
//   tau_l = (p2 N^2 / pi^2) sin(pi/N) sin(pi (2l-1) / N).
inline double crossing_time(int l, const DimensionlessParams& params) {
    if (l < 1 || l >= params.n_sites)
        throw std::out_of_range("crossing_time: transition index " + std::to_string(l) +
                                " out of range for N=" + std::to_string(params.n_sites));
    const double n = static_cast<double>(params.n_sites);
    return params.p2 * n * n / (pi * pi) * std::sin(pi / n) *
           std::sin(pi * (2.0 * static_cast<double>(l) - 1.0) / n);
}

// Resonant pathway of consecutive crossings from the ground state: transition
// times for l = 1 .. floor(N/4)+1, nondecreasing (the last two coincide when
// N is divisible by 4).
struct CrossingSchedule {
    std::vector<double> times;  // times[i] is tau_{i+1}

    double final_time() const { return times.empty() ? 0.0 : times.back(); }
};

inline CrossingSchedule crossing_schedule(const DimensionlessParams& params) {
    CrossingSchedule sched;
    const int l_max = params.n_sites / 4 + 1;
    sched.times.reserve(static_cast<std::size_t>(l_max));
    for (int l = 1; l <= l_max && l < params.n_sites; ++l)
        sched.times.push_back(crossing_time(l, params));
    return sched;
}

}  // namespace chirplat
