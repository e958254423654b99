// experiment.hpp — run-level drivers behind the CLI: configured single runs,
// parameter-grid sweeps, threshold bisection, boundary-curve emission, and
// reduced-system ray ensembles.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chirplat/io.hpp"
#include "chirplat/lattice.hpp"
#include "chirplat/modes.hpp"
#include "chirplat/params.hpp"
#include "chirplat/rays.hpp"
#include "chirplat/regimes.hpp"

namespace chirplat {

enum class Engine { modes, site };

struct SweepAxis {
    std::string param;  // p1 | p2 | p3
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool log_scale = false;

    std::vector<double> grid() const {
        if (count < 1) throw ConfigError("sweep axis count must be >= 1");
        if (log_scale && !(min > 0.0 && max > 0.0))
            throw ConfigError("log sweep axis requires positive bounds");
        std::vector<double> g(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const double f = (count == 1) ? 0.0
                                          : static_cast<double>(i) / (count - 1);
            g[i] = log_scale ? min * std::pow(max / min, f) : min + (max - min) * f;
        }
        return g;
    }
};

struct ExperimentConfig {
    DimensionlessParams params;
    Boundary boundary = Boundary::periodic;
    Drive drive_kind = Drive::traveling;
    Engine engine = Engine::modes;
    std::string initial_file;  // optional site-amplitude override, "re im" per line

    double tau_final = -1.0;  // resolved from target_mode when < 0
    int target_mode = -1;     // defaults to the window midpoint
    double sample_every = 0.0;  // <= 0: tau_final / 400
    IntegratorConfig integ;

    std::optional<EfficiencyWindow> window;

    std::vector<SweepAxis> axes;

    double bracket_lo = 0.02;
    double bracket_hi = 1.0;
    double target_transfer = 0.5;
    double p1_tol = 1e-3;

    double p1_min = 0.1, p1_max = 1.3;
    int p1_count = 25;
    int ladder_r = 10;
    double p2_min = 0.1, p2_max = 100.0;

    int ray_count = 32;
    std::string phi0_rule = "stable";  // stable | uniform | grid | <number>
    double k_init = 0.0;

    std::string out_dir = "out";
    std::string format = "csv";
    int jobs = 1;
    std::uint64_t seed = 0;
    bool resume = false;

    EfficiencyWindow resolved_window() const {
        EfficiencyWindow w = window ? *window : EfficiencyWindow::default_for(params.n_sites);
        w.validate(params.n_sites);
        return w;
    }

    int resolved_target_mode() const {
        if (target_mode > 0) return target_mode;
        const EfficiencyWindow w = resolved_window();
        return (w.lo_mode + w.hi_mode) / 2;
    }

    double resolved_tau_final() const {
        if (tau_final > 0.0) return tau_final;
        const double tf = crossing_time(resolved_target_mode(), params);
        if (!(tf > 0.0)) throw ConfigError("resolved tau_final must be > 0");
        return tf;
    }

    double resolved_sample_every(double tau_f) const {
        return sample_every > 0.0 ? sample_every : tau_f / 400.0;
    }
};

// ------------------------------- single runs ----------------------------------

struct RunResult {
    std::vector<double> sample_taus;
    std::vector<std::vector<double>> mode_populations;  // one row per sample
    ModeState final_state;                              // rotating frame
    std::vector<LatticeState> site_trajectory;          // engine == site only
    double efficiency = 0.0;
    RegimeLabel regime = RegimeLabel::below_ar_threshold;
    double norm_drift = 0.0;
    double tau_final = 0.0;
    double wall_ms = 0.0;
};

inline LatticeState load_initial_site_state(const std::string& path, int n_sites) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open initial-state file: " + path);
    LatticeState s;
    double re, im;
    while (in >> re >> im) s.amplitudes.emplace_back(re, im);
    if (static_cast<int>(s.amplitudes.size()) != n_sites)
        throw ConfigError("initial-state file must contain exactly N amplitude pairs");
    const double nrm = norm(s);
    if (!(std::abs(nrm - 1.0) < 1e-6))
        throw ConfigError("initial state must be normalized (got norm " + fmt_g(nrm) + ")");
    return s;
}

inline RunResult run_single(const ExperimentConfig& cfg, const DriveSchedule& drive) {
    cfg.params.validate();
    check_pairing(cfg.boundary, cfg.drive_kind);
    if (cfg.engine == Engine::modes && cfg.boundary != Boundary::periodic)
        throw ConfigError("mode engine supports periodic boundaries only (use engine = site)");

    const double tau_f = cfg.resolved_tau_final();
    IntegratorConfig integ = cfg.integ;
    integ.sample_every = cfg.resolved_sample_every(tau_f);
    const EfficiencyWindow w = cfg.resolved_window();

    const auto t0 = std::chrono::steady_clock::now();
    RunResult r;
    r.tau_final = tau_f;

    if (cfg.engine == Engine::modes) {
        ModeState init = mode_ground_state(cfg.params.n_sites);
        if (!cfg.initial_file.empty()) {
            const LatticeState site = load_initial_site_state(cfg.initial_file, cfg.params.n_sites);
            init = site_to_modes(site, cfg.params, drive, Frame::rotating);
        }
        auto traj = integrate_modes(init, cfg.params, drive, integ, tau_f);
        r.sample_taus.reserve(traj.size());
        r.mode_populations.reserve(traj.size());
        for (const ModeState& s : traj) {
            r.sample_taus.push_back(s.tau);
            r.mode_populations.push_back(populations(s));
        }
        r.final_state = std::move(traj.back());
    } else {
        LatticeState init;
        if (!cfg.initial_file.empty()) {
            init = load_initial_site_state(cfg.initial_file, cfg.params.n_sites);
            init.tau = 0.0;
        } else if (cfg.boundary == Boundary::periodic) {
            init = uniform_ground_state(cfg.params.n_sites);
        } else {
            init = standing_mode_state(cfg.params.n_sites, 1);
        }
        r.site_trajectory = integrate_site(init, cfg.params, drive, cfg.boundary, cfg.drive_kind,
                                           integ, tau_f);
        r.sample_taus.reserve(r.site_trajectory.size());
        r.mode_populations.reserve(r.site_trajectory.size());
        for (const LatticeState& s : r.site_trajectory) {
            r.sample_taus.push_back(s.tau);
            if (cfg.boundary == Boundary::periodic) {
                ModeState m = site_to_modes(s, cfg.params, drive, Frame::rotating);
                r.mode_populations.push_back(populations(m));
            } else {
                r.mode_populations.push_back(standing_mode_populations(s));
            }
        }
        if (cfg.boundary == Boundary::periodic)
            r.final_state = site_to_modes(r.site_trajectory.back(), cfg.params, drive,
                                          Frame::rotating);
        else {
            r.final_state.amplitudes.assign(static_cast<std::size_t>(cfg.params.n_sites), cxd(0.0));
            const auto pops = r.mode_populations.back();
            for (std::size_t l = 0; l < pops.size(); ++l)
                r.final_state.amplitudes[l] = std::sqrt(pops[l]);
            r.final_state.frame = Frame::rotating;
            r.final_state.tau = tau_f;
        }
    }

    r.efficiency = efficiency(r.final_state, w);
    r.regime = classify(cfg.params, tau_f, drive);
    double drift = 0.0;
    for (const auto& pops : r.mode_populations) {
        double total = 0.0;
        for (double p : pops) total += p;
        drift = std::max(drift, std::abs(total - 1.0));
    }
    r.norm_drift = drift;
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    return r;
}

// --------------------------------- sweeps -------------------------------------

struct SweepRecord {
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    double efficiency = std::numeric_limits<double>::quiet_NaN();
    RegimeLabel regime = RegimeLabel::below_ar_threshold;
    double norm_drift = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
    std::string error;  // empty on success
};

inline void apply_axis_value(DimensionlessParams& p, const std::string& name, double value) {
    if (name == "p1") p.p1 = value;
    else if (name == "p2") p.p2 = value;
    else if (name == "p3") p.p3 = value;
    else throw ConfigError("unknown sweep parameter: " + name);
}

// Runs the grid in row-major order (axis 1 outer, axis 2 inner). Points with
// index < skip_first are left untouched (resume support); each computed point
// is independent, so results are identical for any jobs count.
inline std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg, const DriveSchedule& drive,
                                          int skip_first = 0) {
    if (cfg.axes.empty() || cfg.axes.size() > 2)
        throw ConfigError("sweep requires one or two axes");
    const std::vector<double> g1 = cfg.axes[0].grid();
    const std::vector<double> g2 =
        cfg.axes.size() == 2 ? cfg.axes[1].grid() : std::vector<double>{0.0};
    const int n1 = static_cast<int>(g1.size());
    const int n2 = static_cast<int>(g2.size());
    const int total = n1 * n2;
    const int skip = std::clamp(skip_first, 0, total);

    std::vector<SweepRecord> records(static_cast<std::size_t>(total));
    parallel_for(total - skip, cfg.jobs, [&](int tail_idx) {
        const int idx = skip + tail_idx;
        const int i = idx / n2;
        const int j = idx % n2;
        ExperimentConfig point = cfg;
        point.axes.clear();
        apply_axis_value(point.params, cfg.axes[0].param, g1[i]);
        if (cfg.axes.size() == 2) apply_axis_value(point.params, cfg.axes[1].param, g2[j]);
        SweepRecord rec;
        rec.p1 = point.params.p1;
        rec.p2 = point.params.p2;
        rec.p3 = point.params.p3;
        try {
            const RunResult r = run_single(point, drive);
            rec.efficiency = r.efficiency;
            rec.regime = r.regime;
            rec.norm_drift = r.norm_drift;
            rec.wall_ms = r.wall_ms;
        } catch (const std::exception& e) {
            rec.error = e.what();
            for (char& c : rec.error)
                if (c == ',' || c == '\n') c = ';';
        }
        records[static_cast<std::size_t>(idx)] = std::move(rec);
    });
    return records;
}

// ---------------------------- threshold bisection ------------------------------

struct ThresholdResult {
    double p1_cr = 0.0;
    int evaluations = 0;
    double transfer_lo = 0.0;  // measured at the bracket ends
    double transfer_hi = 0.0;
};

struct BracketError : NumericError {
    double transfer_lo, transfer_hi;
    BracketError(double lo, double hi)
        : NumericError("threshold bracket does not straddle the target transfer (endpoints " +
                       fmt_g(lo) + ", " + fmt_g(hi) + ")"),
          transfer_lo(lo),
          transfer_hi(hi) {}
};

// Bisects p1 for the drive strength transferring `target_transfer` of the
// population into the efficiency window at tau_final.
inline ThresholdResult bisect_threshold(const ExperimentConfig& cfg, const DriveSchedule& drive) {
    ThresholdResult res;
    auto transfer_at = [&](double p1) {
        ExperimentConfig point = cfg;
        point.params.p1 = p1;
        ++res.evaluations;
        return run_single(point, drive).efficiency;
    };

    double lo = cfg.bracket_lo, hi = cfg.bracket_hi;
    if (!(lo <= hi)) throw ConfigError("threshold bracket must have bracket_lo <= bracket_hi");
    if (lo == hi) {  // degenerate bracket: nothing to search
        res.p1_cr = lo;
        return res;
    }
    res.transfer_lo = transfer_at(lo);
    res.transfer_hi = transfer_at(hi);
    const double target = cfg.target_transfer;
    if (!(res.transfer_lo < target && target <= res.transfer_hi))
        throw BracketError(res.transfer_lo, res.transfer_hi);

    while (hi - lo > cfg.p1_tol) {
        const double mid = 0.5 * (lo + hi);
        (transfer_at(mid) < target ? lo : hi) = mid;
    }
    res.p1_cr = 0.5 * (lo + hi);
    return res;
}

// ----------------------------- boundary curves ---------------------------------

struct BoundaryPoint {
    double p1;
    double p2_boundary;
};

struct BoundaryCurves {
    std::vector<BoundaryPoint> ar;            // p2 = 1/(4 p1)
    std::vector<BoundaryPoint> separation;    // p2 = 1/2 + p1/2 + p3
    std::vector<BoundaryPoint> separatrix;    // Appendix-style locus
    std::vector<BoundaryPoint> ladder;        // vertical line p1 = ladder threshold
};

inline BoundaryCurves compute_boundaries(const ExperimentConfig& cfg,
                                         const DriveSchedule& drive) {
    BoundaryCurves curves;
    SweepAxis ax{"p1", cfg.p1_min, cfg.p1_max, cfg.p1_count, true};
    const double tau_factor = crossing_time(cfg.resolved_target_mode(),
                                            [&] {
                                                DimensionlessParams p = cfg.params;
                                                p.p2 = 1.0;
                                                return p;
                                            }());
    const EfficiencyWindow w = cfg.resolved_window();
    const double k_edge = w.k_lower_edge(cfg.params.n_sites);
    for (double p1 : ax.grid()) {
        curves.ar.push_back({p1, ar_threshold_p2(p1)});
        curves.separation.push_back({p1, separation_p2(p1, cfg.params.p3)});
        curves.separatrix.push_back(
            {p1, separatrix_boundary_p2(p1, cfg.params, drive, tau_factor, k_edge)});
    }
    const double p1_ladder = ladder_threshold(cfg.ladder_r, cfg.params.p3);
    SweepAxis p2ax{"p2", cfg.p2_min, cfg.p2_max, cfg.p1_count, true};
    for (double p2 : p2ax.grid()) curves.ladder.push_back({p1_ladder, p2});
    return curves;
}

// ------------------------------ ray ensembles ----------------------------------

struct RaySample {
    int ray_id;
    double tau, x, k, phi;
    bool captured;
};

struct RayEnsembleResult {
    std::vector<std::vector<PendulumState>> trajectories;
    std::vector<bool> captured;
    std::vector<RaySample> samples;
    double capture_fraction = std::numeric_limits<double>::quiet_NaN();  // NaN when empty
};

// Initial mismatch angle of the slowly captured trajectory: the stable fixed
// point of the tilted pendulum at tau = 0 (saturating at -pi/2 when the
// fixed point does not exist).
inline double stable_point_phi0(const DimensionlessParams& params) {
    const double a = 4.0 * params.p1 * params.p2;
    if (!(a > 0.0)) return -0.5 * pi;
    return -std::asin(std::min(1.0, 1.0 / a));
}

inline RayEnsembleResult run_ray_ensemble(const ExperimentConfig& cfg,
                                          const DriveSchedule& drive) {
    cfg.params.validate();
    RayEnsembleResult result;
    const int count = cfg.ray_count;
    if (count <= 0) return result;  // empty ensemble: fraction stays NaN

    const double tau_f = cfg.resolved_tau_final();
    IntegratorConfig integ = cfg.integ;
    integ.sample_every = cfg.resolved_sample_every(tau_f);

    std::vector<double> phi0(static_cast<std::size_t>(count));
    if (cfg.phi0_rule == "stable") {
        for (auto& p : phi0) p = stable_point_phi0(cfg.params);
    } else if (cfg.phi0_rule == "uniform") {
        for (int i = 0; i < count; ++i)
            phi0[i] = -pi + 2.0 * pi * seeded_uniform(cfg.seed, static_cast<std::uint64_t>(i));
    } else if (cfg.phi0_rule == "grid") {
        for (int i = 0; i < count; ++i) phi0[i] = -pi + 2.0 * pi * (i + 0.5) / count;
    } else {
        const double v = parse_double("phi0", cfg.phi0_rule);
        for (auto& p : phi0) p = v;
    }

    result.trajectories.resize(static_cast<std::size_t>(count));
    result.captured.assign(static_cast<std::size_t>(count), false);
    parallel_for(count, cfg.jobs, [&](int i) {
        PendulumState init{phi0[static_cast<std::size_t>(i)], cfg.k_init, 0.0};
        auto traj = integrate_reduced(init, cfg.params, drive, integ, tau_f);
        result.captured[static_cast<std::size_t>(i)] = detect_capture(traj, cfg.params, drive);
        result.trajectories[static_cast<std::size_t>(i)] = std::move(traj);
    });

    int captured_count = 0;
    const double k0 = cfg.params.k0();
    for (int i = 0; i < count; ++i) {
        if (result.captured[static_cast<std::size_t>(i)]) ++captured_count;
        for (const PendulumState& p : result.trajectories[static_cast<std::size_t>(i)])
            result.samples.push_back(RaySample{i, p.tau, (p.phi + drive.theta_d(p.tau)) / k0,
                                               p.k, p.phi,
                                               result.captured[static_cast<std::size_t>(i)]});
    }
    result.capture_fraction = static_cast<double>(captured_count) / count;
    return result;
}

}  // namespace chirplat
