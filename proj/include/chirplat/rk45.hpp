// rk45.hpp — adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with PI step
// control and FSAL. Generic over the state scalar (double or complex<double>);
// states are std::vector<Scalar>.
//
// Sampling: the integrator lands exactly on requested observer times by
// clamping the step, which keeps output independent of internal step history.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "chirplat/params.hpp"

namespace chirplat {

struct StepSizeUnderflow : NumericError {
    double tau;
    explicit StepSizeUnderflow(double tau_at_failure)
        : NumericError("step size underflow at tau=" + std::to_string(tau_at_failure)),
          tau(tau_at_failure) {}
};

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double sample_every = 0.0;  // <= 0: endpoints only

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw ConfigError("integrator tolerances must be positive");
        if (!(max_step > 0.0)) throw ConfigError("max_step must be positive");
    }
};

namespace detail {

// Dormand-Prince coefficients.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a2[1] = {1.0 / 5};
inline constexpr double dp_a3[2] = {3.0 / 40, 9.0 / 40};
inline constexpr double dp_a4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
inline constexpr double dp_a5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
inline constexpr double dp_a6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                    -5103.0 / 18656};
inline constexpr double dp_b[7] = {35.0 / 384,      0.0,         500.0 / 1113, 125.0 / 192,
                                   -2187.0 / 6784,  11.0 / 84,   0.0};
// b5 - b4: weights of the embedded error estimate.
inline constexpr double dp_e[7] = {71.0 / 57600,  0.0,           -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace detail

// Integrates dy/dtau = rhs(tau, y, dydt) from tau0 to tau1 (either direction).
// The observer is called at tau0, at every multiple of cfg.sample_every past
// tau0, and at tau1, with signature observer(double tau, const State& y).
template <typename Scalar, typename Rhs, typename Observer>
void integrate_adaptive(Rhs&& rhs, std::vector<Scalar>& y, double tau0, double tau1,
                        const IntegratorConfig& cfg, Observer&& observer) {
    using State = std::vector<Scalar>;
    cfg.validate();
    const std::size_t n = y.size();
    const double dir = (tau1 >= tau0) ? 1.0 : -1.0;
    const double span = std::abs(tau1 - tau0);

    State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    auto scaled_err = [&](const State& err, const State& a, const State& b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double scale =
                cfg.abs_tol + cfg.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
            const double e = std::abs(err[i]) / scale;
            sum += e * e;
        }
        return std::sqrt(sum / static_cast<double>(std::max<std::size_t>(n, 1)));
    };

    double tau = tau0;
    observer(tau, y);
    if (span == 0.0) return;

    rhs(tau, y, k1);

    // Initial step heuristic (Hairer-style, one Euler probe).
    double h;
    {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double scale = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
            d0 += std::norm(std::abs(y[i]) / scale);
            d1 += std::norm(std::abs(k1[i]) / scale);
        }
        d0 = std::sqrt(d0 / std::max<std::size_t>(n, 1));
        d1 = std::sqrt(d1 / std::max<std::size_t>(n, 1));
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min({h0, span, cfg.max_step});
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + Scalar(dir * h0) * k1[i];
        rhs(tau + dir * h0, ytmp, k2);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double scale = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
            d2 += std::norm(std::abs(k2[i] - k1[i]) / scale);
        }
        d2 = std::sqrt(d2 / std::max<std::size_t>(n, 1)) / h0;
        const double d12 = std::max(d1, d2);
        const double h1 = (d12 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                         : std::pow(0.01 / d12, 1.0 / 5.0);
        h = std::min({100.0 * h0, h1, span, cfg.max_step});
    }

    const double sample = cfg.sample_every;
    int next_sample_idx = 1;
    double err_prev = 1.0;  // PI controller memory
    const double eps = std::numeric_limits<double>::epsilon();

    while (dir * (tau1 - tau) > 0.0) {
        const double tiny = 32.0 * eps * std::max({std::abs(tau), std::abs(tau1), 1.0});
        // Next mandatory stop: sample time or tau1, whichever is first. Sample
        // times within rounding of tau1 are swallowed into the endpoint.
        double stop = tau1;
        if (sample > 0.0) {
            const double t_next = tau0 + dir * sample * next_sample_idx;
            if (dir * (t_next - tau1) < -tiny) stop = t_next;
        }
        double h_here = std::min(h, cfg.max_step);
        bool hit_stop = false;
        if (h_here >= dir * (stop - tau) - tiny) {
            h_here = dir * (stop - tau);
            hit_stop = true;
        }
        if (h_here <= 16.0 * eps * std::max(std::abs(tau), 1.0)) throw StepSizeUnderflow(tau);

        const double hs = dir * h_here;
        using detail::dp_a2;
        using detail::dp_a3;
        using detail::dp_a4;
        using detail::dp_a5;
        using detail::dp_a6;
        using detail::dp_b;
        using detail::dp_c;
        using detail::dp_e;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + Scalar(hs * dp_a2[0]) * k1[i];
        rhs(tau + hs * dp_c[1], ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + Scalar(hs) * (Scalar(dp_a3[0]) * k1[i] + Scalar(dp_a3[1]) * k2[i]);
        rhs(tau + hs * dp_c[2], ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + Scalar(hs) * (Scalar(dp_a4[0]) * k1[i] + Scalar(dp_a4[1]) * k2[i] +
                                           Scalar(dp_a4[2]) * k3[i]);
        rhs(tau + hs * dp_c[3], ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + Scalar(hs) * (Scalar(dp_a5[0]) * k1[i] + Scalar(dp_a5[1]) * k2[i] +
                                           Scalar(dp_a5[2]) * k3[i] + Scalar(dp_a5[3]) * k4[i]);
        rhs(tau + hs * dp_c[4], ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + Scalar(hs) * (Scalar(dp_a6[0]) * k1[i] + Scalar(dp_a6[1]) * k2[i] +
                                           Scalar(dp_a6[2]) * k3[i] + Scalar(dp_a6[3]) * k4[i] +
                                           Scalar(dp_a6[4]) * k5[i]);
        rhs(tau + hs * dp_c[5], ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + Scalar(hs) * (Scalar(dp_b[0]) * k1[i] + Scalar(dp_b[2]) * k3[i] +
                                           Scalar(dp_b[3]) * k4[i] + Scalar(dp_b[4]) * k5[i] +
                                           Scalar(dp_b[5]) * k6[i]);
        rhs(tau + hs, ynew, k7);

        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = Scalar(hs) * (Scalar(dp_e[0]) * k1[i] + Scalar(dp_e[2]) * k3[i] +
                                    Scalar(dp_e[3]) * k4[i] + Scalar(dp_e[4]) * k5[i] +
                                    Scalar(dp_e[5]) * k6[i] + Scalar(dp_e[6]) * k7[i]);
        const double err = scaled_err(ytmp, y, ynew);

        if (err <= 1.0) {
            tau = hit_stop ? stop : tau + hs;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            if (hit_stop) {
                observer(tau, y);
                if (sample > 0.0 && stop != tau1) ++next_sample_idx;
            }
            // PI controller (Gustafsson): h *= s * err^-0.7/5 * err_prev^0.4/5.
            const double e = std::max(err, 1e-10);
            double fac = 0.9 * std::pow(e, -0.14) * std::pow(std::max(err_prev, 1e-10), 0.08);
            fac = std::clamp(fac, 0.2, 10.0);
            double h_new = h_here * fac;
            // A step clamped by a stop must not shrink the working step.
            if (hit_stop) h_new = std::max(h_new, h);
            h = std::min(h_new, cfg.max_step);
            err_prev = e;
        } else {
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            h = h_here * fac;
        }
    }
}

}  // namespace chirplat
