#include <doctest.h>

#include <cmath>

#include "chirplat/experiment.hpp"
#include "chirplat/rays.hpp"

using namespace chirplat;

namespace {
const DriveSchedule kDrive = DriveSchedule::quadratic_chirp();
}

TEST_CASE("omega_local: band limits and quadratic bottom") {
    const DimensionlessParams p{0.0, 2.0, 0.0, 40};
    CHECK(omega_local(3.0, 0.0, 1.0, p, kDrive) == 0.0);
    CHECK(omega_local(3.0, pi, 1.0, p, kDrive) ==
          doctest::Approx(p.p2 * 1600.0 / (pi * pi)).epsilon(1e-13));

    // d^2 Omega / dk^2 at k = 0 equals p2 N^2 / (2 pi^2): finite differences.
    const DimensionlessParams q{0.7, 2.0, 0.0, 40};
    const double h = 1e-4;
    const double fd = (omega_local(0.0, h, 2.0, q, kDrive) -
                       2.0 * omega_local(0.0, 0.0, 2.0, q, kDrive) +
                       omega_local(0.0, -h, 2.0, q, kDrive)) /
                      (h * h);
    CHECK(fd == doctest::Approx(q.p2 * 1600.0 / (2.0 * pi * pi)).epsilon(1e-5));
}

TEST_CASE("ray flow: free ray moves at the group velocity with constant k") {
    const DimensionlessParams p{0.0, 1.5, 0.0, 60};
    const double k = 0.9;
    IntegratorConfig cfg;
    const auto traj = integrate_ray(make_ray(2.0, k, 0.0, p, kDrive), p, kDrive, cfg, 10.0);
    const double vg = p.p2 * 3600.0 / (2.0 * pi * pi) * std::sin(k);
    CHECK(traj.back().k == doctest::Approx(k).epsilon(1e-12));
    CHECK(traj.back().x == doctest::Approx(2.0 + vg * 10.0).epsilon(1e-10));
}

TEST_CASE("ray flow: evolved Omega stays equal to the local dispersion") {
    const DimensionlessParams p{0.6, 2.0, 0.0, 60};
    IntegratorConfig cfg;
    cfg.sample_every = 1.0;
    const auto traj = integrate_ray(make_ray(1.0, 0.2, 0.0, p, kDrive), p, kDrive, cfg, 12.0);
    for (const auto& r : traj)
        CHECK(std::abs(r.omega - omega_local(r.x, r.k, r.tau, p, kDrive)) < 1e-8);
}

TEST_CASE("ray flow: phase-space area preserved (Liouville)") {
    const DimensionlessParams p{0.6, 2.0, 0.0, 60};
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;

    // Tangent map along the ray: det J must stay 1 for the (x, k) flow.
    {
        const double hop = p.p2 * 3600.0 / (2.0 * pi * pi);
        const double k0 = p.k0();
        std::vector<double> y = {1.0, 0.25, 1.0, 0.0, 0.0, 1.0};  // x, k, J row-major
        auto rhs = [&](double tau, const std::vector<double>& v, std::vector<double>& dv) {
            const double dfdk = hop * std::cos(v[1]);
            const double dgdx = -2.0 * p.p1 * k0 * k0 * std::cos(k0 * v[0] - kDrive.theta_d(tau));
            dv[0] = hop * std::sin(v[1]);
            dv[1] = -2.0 * p.p1 * k0 * std::sin(k0 * v[0] - kDrive.theta_d(tau));
            dv[2] = dfdk * v[4];
            dv[3] = dfdk * v[5];
            dv[4] = dgdx * v[2];
            dv[5] = dgdx * v[3];
        };
        integrate_adaptive<double>(rhs, y, 0.0, 10.0, cfg,
                                   [](double, const std::vector<double>&) {});
        const double det = y[2] * y[5] - y[3] * y[4];
        CHECK(det == doctest::Approx(1.0).epsilon(1e-6));
    }

    // Brute-force confirmation: centered-difference corners of a small
    // parallelogram (limited by finite-difference truncation).
    {
        const double dq = 1e-5;
        auto corner = [&](double x0, double k0) {
            const auto t = integrate_ray(make_ray(x0, k0, 0.0, p, kDrive), p, kDrive, cfg, 10.0);
            return std::pair{t.back().x, t.back().k};
        };
        const auto xp = corner(1.0 + dq / 2, 0.25), xm = corner(1.0 - dq / 2, 0.25);
        const auto kp = corner(1.0, 0.25 + dq / 2), km = corner(1.0, 0.25 - dq / 2);
        const double area = ((xp.first - xm.first) * (kp.second - km.second) -
                             (kp.first - km.first) * (xp.second - xm.second)) /
                            (dq * dq);
        CHECK(area == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("reduced system: stationary-phase derivative values") {
    const DimensionlessParams p{0.7, 2.0, 0.0, 80};
    auto [dphi_a, dk_a] = reduced_rhs(PendulumState{pi / 2.0, 0.0, 0.0}, p, kDrive);
    CHECK(dphi_a == 0.0);
    CHECK(dk_a == doctest::Approx(-p.p1 * 4.0 * pi / 80.0).epsilon(1e-13));
    auto [dphi_b, dk_b] = reduced_rhs(PendulumState{-pi / 2.0, 0.0, 0.0}, p, kDrive);
    CHECK(dphi_b == 0.0);
    CHECK(dk_b == doctest::Approx(p.p1 * 4.0 * pi / 80.0).epsilon(1e-13));
}

TEST_CASE("reduced system reproduces the full ray flow through Phi = k0 x - theta_d") {
    const DimensionlessParams p{0.5, 1.0, 0.0, 80};
    const double phi0 = stable_point_phi0(p);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    cfg.sample_every = 2.0;

    const auto red = integrate_reduced(PendulumState{phi0, 0.0, 0.0}, p, kDrive, cfg, 20.0);
    const double x0 = phi0 / p.k0();
    const auto ray = integrate_ray(make_ray(x0, 0.0, 0.0, p, kDrive), p, kDrive, cfg, 20.0);
    REQUIRE(red.size() == ray.size());
    for (std::size_t i = 0; i < red.size(); ++i) {
        const double phi_ray = p.k0() * ray[i].x - kDrive.theta_d(ray[i].tau);
        CHECK(std::abs(phi_ray - red[i].phi) < 1e-6);
        CHECK(std::abs(ray[i].k - red[i].k) < 1e-6);
    }
}

TEST_CASE("k_resonant: values and band-edge loss") {
    const DimensionlessParams p{0.0, 5.0, 0.0, 80};
    CHECK(*k_resonant(0.0, p, kDrive) == 0.0);
    // At the band edge the resonance condition saturates at pi/2.
    CHECK(*k_resonant(5.0 * 80.0 / pi, p, kDrive) == doctest::Approx(pi / 2.0).epsilon(1e-12));
    CHECK(!k_resonant(5.0 * 80.0 / pi * 1.0001, p, kDrive).has_value());
    // tau_f = tau_15 scaling: arcsin(0.9079...).
    const double tf = 23.1197326990205 * 5.0;
    CHECK(*k_resonant(tf, p, kDrive) == doctest::Approx(1.13827019501).epsilon(1e-9));
}

TEST_CASE("detect_capture: locked, unlocked, undriven") {
    const int n = 80;
    const double p2 = 2.0;
    const double tf = 0.5 * p2 * n / pi;  // sin k_r(tau_f) = 0.5
    IntegratorConfig cfg;
    cfg.sample_every = tf / 400.0;

    auto run = [&](double q) {
        DimensionlessParams p{q / p2, p2, 0.0, n};
        const auto traj =
            integrate_reduced(PendulumState{stable_point_phi0(p), 0.0, 0.0}, p, kDrive, cfg, tf);
        return std::pair{detect_capture(traj, p, kDrive), traj.back().k};
    };

    // Twice the locking threshold: captured, k at the resonant value.
    {
        const auto [cap, k_end] = run(0.5);
        CHECK(cap);
        CHECK(k_end == doctest::Approx(std::asin(0.5)).epsilon(0.05));
    }
    // Well below threshold: never captured, k stays near zero, for any phase.
    {
        DimensionlessParams p{0.05, p2, 0.0, n};
        for (double phi0 : {0.0, pi / 2.0, -pi / 2.0, pi}) {
            const auto traj =
                integrate_reduced(PendulumState{phi0, 0.0, 0.0}, p, kDrive, cfg, tf);
            CHECK(!detect_capture(traj, p, kDrive));
            CHECK(std::abs(traj.back().k) < 0.3);
        }
    }
    // No drive at all: k frozen, never captured.
    {
        DimensionlessParams p{0.0, p2, 0.0, n};
        const auto traj = integrate_reduced(PendulumState{0.3, 0.0, 0.0}, p, kDrive, cfg, tf);
        CHECK(!detect_capture(traj, p, kDrive));
        CHECK(traj.back().k == 0.0);
    }
}

TEST_CASE("captured trajectories keep the resonance mismatch bounded") {
    const int n = 80;
    const double p2 = 2.0;
    const double tf = 0.5 * p2 * n / pi;
    IntegratorConfig cfg;
    cfg.sample_every = tf / 400.0;
    auto mismatch = [&](const PendulumState& s, const DimensionlessParams& p) {
        return std::sin(s.k) * p.p2 * n / pi - s.tau;
    };
    {
        DimensionlessParams p{0.25, p2, 0.0, n};  // q = 0.5, locked
        const auto traj =
            integrate_reduced(PendulumState{stable_point_phi0(p), 0.0, 0.0}, p, kDrive, cfg, tf);
        double worst = 0.0;
        for (const auto& s : traj) worst = std::max(worst, std::abs(mismatch(s, p)));
        CHECK(worst < 10.0);
    }
    {
        DimensionlessParams p{0.05, p2, 0.0, n};  // q = 0.1, unlocked
        const auto traj =
            integrate_reduced(PendulumState{stable_point_phi0(p), 0.0, 0.0}, p, kDrive, cfg, tf);
        CHECK(std::abs(mismatch(traj.back(), p)) > 0.8 * tf);
    }
}

TEST_CASE("separatrix_geometry: existence, degeneracy, asymptotics") {
    const DimensionlessParams base{0.0, 1.0, 0.0, 80};
    // No resonance past the band edge.
    {
        DimensionlessParams p = base;
        p.p1 = 1.0;
        CHECK(!separatrix_geometry(p, 1.0 * 80.0 / pi * 1.01, kDrive).has_value());
    }
    // Below the locking product there is no separatrix.
    {
        DimensionlessParams p = base;
        p.p1 = 0.2;  // 4 p1 p2 = 0.8 < 1
        CHECK(!separatrix_geometry(p, 0.0, kDrive).has_value());
    }
    // Barely above threshold: tiny lobe, edge at the resonant wavenumber.
    {
        DimensionlessParams p = base;
        p.p1 = 0.2501;
        p.p2 = 1.0001;
        const double tau = 1e-3;
        const auto g = separatrix_geometry(p, tau, kDrive);
        REQUIRE(g.has_value());
        CHECK(std::abs(g->min_branch_velocity) < 0.2);
        REQUIRE(g->k_lower_edge.has_value());
        CHECK(*g->k_lower_edge == doctest::Approx(g->k_r).epsilon(0.2));
    }
    // Large-B limit: the lobe spans nearly the full well and the velocity
    // profile approaches the untilted pendulum form 2 sqrt(B) |sin(phi/2)|.
    {
        DimensionlessParams p = base;
        p.p1 = 2500.0;
        const auto g = separatrix_geometry(p, 0.0, kDrive);
        REQUIRE(g.has_value());
        const double b = g->b_param;
        CHECK(b > 1e3);
        CHECK(g->phi_turn == doctest::Approx(-2.0 * pi).epsilon(0.02));
        CHECK(std::abs(g->min_branch_velocity) ==
              doctest::Approx(2.0 * std::sqrt(b)).epsilon(1e-3));
    }
}

TEST_CASE("separatrix_geometry: radicand nonnegative on the lobe") {
    const DimensionlessParams p{0.5, 2.0, 0.0, 80};
    const auto g = separatrix_geometry(p, 10.0, kDrive);
    REQUIRE(g.has_value());
    CHECK(g->phi_turn > -2.0 * pi);
    CHECK(g->phi_turn < 0.0);
    for (int i = 0; i <= 50; ++i) {
        const double phi = g->phi_turn * (1.0 - 1e-9) * i / 50.0;
        CHECK(detail::separatrix_radicand(phi, g->b_param) >= -1e-9);
    }
    // Just beyond the turning point the radicand goes negative.
    CHECK(detail::separatrix_radicand(g->phi_turn - 1e-3, g->b_param) < 0.0);
}

TEST_CASE("separatrix boundary curve: decreasing and above the locking threshold") {
    const DimensionlessParams proto{0.0, 1.0, 0.0, 80};
    const double tau_factor = 23.1197326990205;
    double prev = 1e300;
    for (int i = 0; i <= 12; ++i) {
        const double p1 = 0.1 * std::pow(13.0, i / 12.0);
        const double b = separatrix_boundary_p2(p1, proto, kDrive, tau_factor);
        CHECK(b < prev);
        CHECK(b > 0.25 / p1);
        prev = b;
    }
}
