// Acceptance suite: end-to-end checks of the toolkit against its quantitative
// contract, one pass/fail line per criterion. Exit code is the number of
// failed criteria.
//
//   acceptance [--jobs N] [--criterion K]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "chirplat/chirplat.hpp"

namespace {

using namespace chirplat;

const DriveSchedule kDrive = DriveSchedule::quadratic_chirp();
int g_jobs = 2;

struct Criterion {
    int id;
    const char* name;
    bool (*fn)(std::string&);
};

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// 1. Norm conservation on the 80-site ladder-climbing run.
bool crit_norm_conservation(std::string& detail) {
    const DimensionlessParams p{0.8, 20.0, 0.0, 80};
    const double tf = crossing_time(15, p);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-13;
    cfg.sample_every = tf / 200.0;
    const auto traj = integrate_modes(mode_ground_state(80), p, kDrive, cfg, tf);
    double drift = 0.0;
    for (const auto& s : traj) drift = std::max(drift, std::abs(norm(s) - 1.0));
    detail = "max |norm-1| = " + fmt_g(drift) + " (<= 1e-7), tau_f = " + fmt_g(tf);
    return drift <= 1e-7;
}

// 2. Two-site transfer curve vs 1 - exp(-2 pi p1^2), +-0.02.
bool crit_lz_curve(std::string& detail) {
    double worst = 0.0;
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
    std::vector<double> diffs(grid.size());
    parallel_for(static_cast<int>(grid.size()), g_jobs, [&](int i) {
        const DimensionlessParams p{grid[static_cast<std::size_t>(i)], 100.0, 0.0, 2};
        IntegratorConfig cfg;
        const auto traj = integrate_modes(mode_ground_state(2), p, kDrive, cfg, 100.0);
        diffs[static_cast<std::size_t>(i)] =
            std::abs(std::norm(traj.back().amplitudes[1]) - lz_probability(p.p1));
    });
    for (double d : diffs) worst = std::max(worst, d);
    detail = "worst |pop - formula| = " + fmt_g(worst) + " (<= 0.02)";
    return worst <= 0.02;
}

// 3. Sharp nonlinear threshold bracketing 0.29/sqrt(5).
bool crit_nlz_threshold(std::string& detail) {
    IntegratorConfig cfg;
    auto final_pop = [&](double p1) {
        const DimensionlessParams p{p1, 100.0, 5.0, 2};
        const auto traj = integrate_modes(mode_ground_state(2), p, kDrive, cfg, 100.0);
        return std::norm(traj.back().amplitudes[1]);
    };
    const double below = final_pop(0.10);
    const double above = final_pop(0.16);
    detail = "pop(0.10) = " + fmt_g(below) + " (<= 0.2), pop(0.16) = " + fmt_g(above) +
             " (>= 0.9)";
    return below <= 0.2 && above >= 0.9;
}

// 4. Bisected 50% thresholds trace the linear plateau and nonlinear slope.
bool crit_threshold_crossover(std::string& detail) {
    const std::vector<double> p3s = {0.0, 0.1, 0.3, 1.0, 3.0, 10.0};
    std::vector<double> got(p3s.size());
    parallel_for(static_cast<int>(p3s.size()), g_jobs, [&](int i) {
        ExperimentConfig cfg;
        cfg.params = {0.0, 200.0, p3s[static_cast<std::size_t>(i)], 2};
        cfg.tau_final = 200.0;
        cfg.bracket_lo = 0.02;
        cfg.bracket_hi = 0.8;
        got[static_cast<std::size_t>(i)] = bisect_threshold(cfg, kDrive).p1_cr;
    });
    double worst_rel = 0.0;
    std::string vals;
    for (std::size_t i = 0; i < p3s.size(); ++i) {
        const double theory = (p3s[i] > 0.0)
                                  ? std::min(lz_half_transfer_p1(), nlz_threshold(p3s[i]))
                                  : lz_half_transfer_p1();
        worst_rel = std::max(worst_rel, std::abs(got[i] / theory - 1.0));
        vals += fmt_g(got[i]) + (i + 1 < p3s.size() ? "," : "");
    }
    // Crossover visible: plateau at small p3, sliding threshold at large p3.
    const bool plateau = std::abs(got[0] - got[1]) < 0.05 * got[0];
    const bool slope = got[5] < 0.5 * got[0];
    detail = "p1_cr = {" + vals + "}, worst rel err = " + fmt_g(worst_rel) + " (<= 0.15)";
    return worst_rel <= 0.15 && plateau && slope;
}

// 5. Crossing schedule values and large-N spacing.
bool crit_crossing_schedule(std::string& detail) {
    const double t15 = crossing_time(15, DimensionlessParams{0.0, 1.0, 0.0, 80});
    bool ok = std::abs(t15 - 23.1) <= 0.1;
    const DimensionlessParams big{0.0, 1.0, 0.0, 10000};
    double worst = 0.0;
    for (int l = 1; l <= 5; ++l) {
        const double spacing = crossing_time(l + 1, big) - crossing_time(l, big);
        worst = std::max(worst, std::abs(spacing / 2.0 - 1.0));
    }
    detail = "tau_15/p2 = " + fmt_g(t15) + " (23.1 +- 0.1), spacing err = " + fmt_g(worst) +
             " (<= 0.01)";
    return ok && worst <= 0.01;
}

// 6. Coarse regime map: efficient block in the ladder corner, dead zone below
//    half the locking threshold.
bool crit_regime_map(std::string& detail) {
    ExperimentConfig cfg;
    cfg.params = {0.0, 1.0, 0.0, 80};
    cfg.axes = {SweepAxis{"p1", 0.1, 1.3, 6, true}, SweepAxis{"p2", 0.5, 24.0, 6, true}};
    cfg.jobs = g_jobs;
    const auto recs = run_sweep(cfg, kDrive);
    bool ok = true;
    double min_corner = 1.0, max_dead = 0.0;
    for (const auto& r : recs) {
        if (!r.error.empty()) {
            detail = "point failed: " + r.error;
            return false;
        }
        if (r.p1 >= 0.8 && r.p2 >= 2.0 * (0.5 + 0.5 * r.p1)) {
            min_corner = std::min(min_corner, r.efficiency);
            if (r.efficiency < 0.8) ok = false;
        }
        if (r.p1 * r.p2 <= 0.125) {
            max_dead = std::max(max_dead, r.efficiency);
            if (r.efficiency > 0.1) ok = false;
        }
    }
    detail = "min corner eff = " + fmt_g(min_corner) + " (>= 0.8), max dead eff = " +
             fmt_g(max_dead) + " (<= 0.1)";
    return ok;
}

// 7. Kerr nonlinearity lowers the sharp ladder threshold below the linear one.
bool crit_lowered_ladder_threshold(std::string& detail) {
    const double p1 = 0.3;  // below the linear 10-crossing threshold 0.656
    const double p2 = 2.0 * separation_p2(p1, 2.5);
    const DimensionlessParams p{p1, p2, 2.5, 80};
    const double tf = crossing_time(15, p);
    IntegratorConfig cfg;
    const auto traj = integrate_modes(mode_ground_state(80), p, kDrive, cfg, tf);
    const double eff = efficiency(traj.back(), EfficiencyWindow::default_for(80));
    detail = "eff = " + fmt_g(eff) + " (>= 0.8) at p1 = 0.3, p2 = " + fmt_g(p2) +
             ", sharp threshold " + fmt_g(nlz_threshold(2.5));
    return eff >= 0.8;
}

// 8. Capture threshold of the reduced system near p1 p2 = 1/4.
bool crit_capture_threshold(std::string& detail) {
    const int n = 80;
    const double p2 = 2.0;
    const double tf = 0.5 * p2 * n / pi;  // resonance halfway up the band at tau_f
    const int points = 100;
    std::vector<int> captured(points);
    parallel_for(points, g_jobs, [&](int i) {
        const double q = 0.05 + (1.0 - 0.05) * i / (points - 1.0);
        const DimensionlessParams p{q / p2, p2, 0.0, n};
        IntegratorConfig cfg;
        cfg.sample_every = tf / 400.0;
        const auto traj =
            integrate_reduced(PendulumState{stable_point_phi0(p), 0.0, 0.0}, p, kDrive, cfg, tf);
        captured[static_cast<std::size_t>(i)] = detect_capture(traj, p, kDrive) ? 1 : 0;
    });
    double last_zero = 0.0, first_one = 2.0;
    bool ok = true;
    for (int i = 0; i < points; ++i) {
        const double q = 0.05 + (1.0 - 0.05) * i / (points - 1.0);
        if (captured[static_cast<std::size_t>(i)]) first_one = std::min(first_one, q);
        else last_zero = std::max(last_zero, q);
        if (q <= 0.15 && captured[static_cast<std::size_t>(i)]) ok = false;
        if (q >= 0.4 && !captured[static_cast<std::size_t>(i)]) ok = false;
    }
    // The transition band [last_zero, first_one] must touch 0.25 +- 30%.
    const bool transition_inside =
        std::max(last_zero, 0.7 * 0.25) <= std::min(first_one, 1.3 * 0.25);
    detail = "uncaptured up to q = " + fmt_g(last_zero) + ", captured from q = " +
             fmt_g(first_one) + " (threshold 0.25 +- 30%)";
    return ok && transition_inside;
}

// 9. Site-space and mode-space integrations agree per mode.
bool crit_rwa_equivalence(std::string& detail) {
    const DimensionlessParams p{0.5, 50.0, 0.0, 8};
    const double tf = crossing_time(2, p);
    IntegratorConfig cfg;
    const auto mt = integrate_modes(mode_ground_state(8), p, kDrive, cfg, tf);
    const auto st = integrate_site(uniform_ground_state(8), p, kDrive, Boundary::periodic,
                                   Drive::traveling, cfg, tf);
    const auto site_modes = site_to_modes(st.back(), p, kDrive, Frame::rotating);
    double worst = 0.0;
    for (int l = 0; l < 8; ++l)
        worst = std::max(worst, std::abs(std::norm(mt.back().amplitudes[l]) -
                                         std::norm(site_modes.amplitudes[l])));
    detail = "worst per-mode |diff| = " + fmt_g(worst) + " (<= 0.05)";
    return worst <= 0.05;
}

// 10. Separatrix boundary locus: decreasing in p1, above the locking curve.
bool crit_separatrix_boundary(std::string& detail) {
    const DimensionlessParams proto{0.0, 1.0, 0.0, 80};
    const double tau_factor = crossing_time(15, DimensionlessParams{0.0, 1.0, 0.0, 80});
    double prev = 1e300;
    bool monotone = true, above = true;
    for (int i = 0; i <= 24; ++i) {
        const double p1 = 0.1 * std::pow(13.0, i / 24.0);
        const double b = separatrix_boundary_p2(p1, proto, kDrive, tau_factor);
        if (b >= prev) monotone = false;
        if (b <= 0.25 / p1) above = false;
        prev = b;
    }
    detail = std::string("monotone decreasing: ") + (monotone ? "yes" : "no") +
             ", above locking curve: " + (above ? "yes" : "no");
    return monotone && above;
}

// 11. Zero-boundary standing ladder: transfers at the standing crossing
//     times, first transfer at the swept-crossing value with coupling p1/2.
bool crit_zero_boundary(std::string& detail) {
    const int n = 20;
    const DimensionlessParams p{1.0, 30.0, 0.0, n};
    const double t2 = standing_crossing_time(2, p);
    const double t3 = standing_crossing_time(3, p);
    IntegratorConfig cfg;
    cfg.sample_every = 0.1;
    const auto traj = integrate_site(standing_mode_state(n, 1), p, kDrive, Boundary::zero,
                                     Drive::standing, cfg, t3 + 0.4 * (t3 - t2));
    // Mean population of mode 2 on the settled stretch after the first
    // transfer, plus the rise times of modes 2 and 3.
    double acc = 0.0;
    int count = 0;
    double rise2 = -1.0, rise3 = -1.0;
    for (const auto& s : traj) {
        const auto pops = standing_mode_populations(s);
        if (s.tau >= t2 + 0.5 * (t3 - t2) && s.tau <= t2 + 0.75 * (t3 - t2)) {
            acc += pops[2];
            ++count;
        }
        if (rise2 < 0.0 && pops[2] > 0.3) rise2 = s.tau;
        if (rise3 < 0.0 && pops[3] > 0.3) rise3 = s.tau;
    }
    const double transfer = acc / count;
    const double expected = lz_probability(p.p1 / 2.0);
    const double dt = transition_duration(p.p1 / 2.0, 0.0);
    const bool at_crossings = rise2 > 0.0 && std::abs(rise2 - t2) <= 2.0 * dt && rise3 > 0.0 &&
                              std::abs(rise3 - t3) <= 2.0 * dt;
    detail = "first transfer = " + fmt_g(transfer) + " vs " + fmt_g(expected) +
             " (+-0.05); rises at " + fmt_g(rise2) + "/" + fmt_g(rise3) + " (crossings " +
             fmt_g(t2) + "/" + fmt_g(t3) + ")";
    return std::abs(transfer - expected) <= 0.05 && at_crossings;
}

// 12. Bow-tie double transition on the 8-site lattice.
bool crit_bow_tie(std::string& detail) {
    const int n = 8;
    const double p2 = 10.0;
    const DimensionlessParams base{0.0, p2, 0.0, n};
    const double tau1 = crossing_time(1, base);
    const double tau2 = crossing_time(2, base);  // == crossing_time(3): bow tie
    bool ok = true;
    std::string vals;
    for (double p1 : {0.3, 0.5, 0.8}) {
        const DimensionlessParams p{p1, p2, 0.0, n};
        IntegratorConfig cfg;
        cfg.sample_every = 0.2;
        const auto traj = integrate_modes(mode_ground_state(n), p, kDrive, cfg,
                                          tau2 + 8.0 * (1.0 + p1));
        const double pre_tau = 0.5 * (tau1 + tau2);
        double pop1_pre = 0.0;
        for (const auto& s : traj)
            if (std::abs(s.tau - pre_tau) <= 0.25) {
                pop1_pre = std::norm(s.amplitudes[1]);
                break;
            }
        const double ratio = std::norm(traj.back().amplitudes[3]) / pop1_pre;
        const double theory = bow_tie_efficiency(p1);
        vals += fmt_g(ratio) + "/" + fmt_g(theory) + " ";
        if (std::abs(ratio - theory) > 0.1) ok = false;
    }
    detail = "measured/theory: " + vals + "(each +-0.1)";
    return ok;
}

const Criterion kCriteria[] = {
    {1, "norm conservation on the 80-site run", crit_norm_conservation},
    {2, "two-site transfer curve vs swept-crossing formula", crit_lz_curve},
    {3, "sharp nonlinear threshold bracket", crit_nlz_threshold},
    {4, "bisected threshold crossover vs the two branches", crit_threshold_crossover},
    {5, "crossing schedule values and spacing", crit_crossing_schedule},
    {6, "coarse regime map corners", crit_regime_map},
    {7, "nonlinearity lowers the efficient ladder threshold", crit_lowered_ladder_threshold},
    {8, "reduced-system capture threshold", crit_capture_threshold},
    {9, "site-space vs mode-space equivalence", crit_rwa_equivalence},
    {10, "separatrix boundary curve shape", crit_separatrix_boundary},
    {11, "zero-boundary standing ladder", crit_zero_boundary},
    {12, "bow-tie double transition", crit_bow_tie},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--jobs") && i + 1 < argc) g_jobs = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: acceptance [--jobs N] [--criterion K]\n");
            return 64;
        }
    }
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        std::string detail;
        const double t0 = now_s();
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double dt = now_s() - t0;
        std::printf("[%s] %2d. %-52s %6.1fs  %s\n", ok ? "PASS" : "FAIL", c.id, c.name, dt,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED", failures);
    return failures;
}
