// regimes.hpp — closed-form thresholds, boundary curves, and regime
// classification for the chirped-drive lattice.

#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "chirplat/params.hpp"
#include "chirplat/rays.hpp"

namespace chirplat {

// Landau-Zener transfer probability for a single swept crossing.
inline double lz_probability(double p1) {
    if (p1 < 0.0) throw ConfigError("lz_probability requires p1 >= 0");
    return 1.0 - std::exp(-2.0 * pi * p1 * p1);
}

// Drive strength for 50% transfer in a single linear crossing.
inline double lz_half_transfer_p1() { return std::sqrt(-std::log(0.5) / (2.0 * pi)); }

// Sharp threshold of the nonlinear crossing, p1 ~ 0.29 / sqrt(p3).
inline double nlz_threshold(double p3) {
    if (!(p3 > 0.0)) throw std::domain_error("nlz_threshold undefined for p3 <= 0 (use LZ)");
    return 0.29 / std::sqrt(p3);
}

// Single-crossing duration estimate Delta tau = 1 + p1 + 2 p3.
inline double transition_duration(double p1, double p3) { return 1.0 + p1 + 2.0 * p3; }

// Drive strength for 50% total transfer after r consecutive linear crossings.
inline double ladder_lz_threshold(int r) {
    if (r < 1) throw ConfigError("ladder threshold requires r >= 1");
    const double per_step = 1.0 - std::pow(2.0, -1.0 / static_cast<double>(r));
    return std::sqrt(-std::log(per_step) / (2.0 * pi));
}

// Nonlinearity at which the r-crossing linear threshold meets the sharp
// nonlinear one; beyond it the sharp threshold governs the whole ladder.
inline double ladder_crossover_p3(int r) {
    const double lz = ladder_lz_threshold(r);
    return (0.29 / lz) * (0.29 / lz);
}

inline double ladder_threshold(int r, double p3) {
    if (p3 > ladder_crossover_p3(r)) return nlz_threshold(p3);
    return ladder_lz_threshold(r);
}

// Crossing-separation requirement for ladder climbing: p2 must exceed this
// (with margin), per tau spacing 2 p2 vs. transition duration.
inline double separation_p2(double p1, double p3) { return 0.5 + 0.5 * p1 + p3; }

// Phase-locking threshold p1 p2 = 1/4: below it no sustained capture exists
// at any nonlinearity. Returns the threshold p2 for a given p1.
inline double ar_threshold_p2(double p1) {
    if (p1 < 0.0) throw ConfigError("ar_threshold_p2 requires p1 >= 0");
    if (p1 == 0.0) return std::numeric_limits<double>::infinity();
    return 0.25 / p1;
}

// ------------------------------ classification --------------------------------

enum class RegimeLabel {
    below_ar_threshold,
    autoresonance,
    ladder_climbing,
    large_separatrix,
    boundary_zone,
};

inline const char* to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::below_ar_threshold: return "below_ar_threshold";
        case RegimeLabel::autoresonance: return "autoresonance";
        case RegimeLabel::ladder_climbing: return "ladder_climbing";
        case RegimeLabel::large_separatrix: return "large_separatrix";
        case RegimeLabel::boundary_zone: return "boundary_zone";
    }
    return "unknown";
}

struct ClassifyConfig {
    double lc_margin = 2.0;      // ladder climbing requires p2 > lc_margin * separation_p2
    double boundary_band = 0.25; // relative half-width of the unreliable zone around each cut
};

// Deterministic regime label for a run of length tau_f. Every decision line
// is shielded by the boundary band, so labels are stable under small
// parameter perturbations away from boundary_zone.
inline RegimeLabel classify(const DimensionlessParams& params, double tau_f,
                            const DriveSchedule& drive, const ClassifyConfig& cc = {}) {
    const double p1 = params.p1;
    const double p2 = params.p2;
    const double band = cc.boundary_band;

    auto near_line = [&](double line) {
        return std::isfinite(line) && line > 0.0 && std::abs(p2 - line) <= band * line;
    };

    const double ar_line = ar_threshold_p2(p1);
    if (near_line(ar_line)) return RegimeLabel::boundary_zone;
    if (p1 * p2 < 0.25) return RegimeLabel::below_ar_threshold;

    const double lc_cut = cc.lc_margin * separation_p2(p1, params.p3);
    if (near_line(lc_cut)) return RegimeLabel::boundary_zone;
    if (p2 > lc_cut) return RegimeLabel::ladder_climbing;

    // Appendix-style separatrix boundary, evaluated with this point's own
    // tau_f/p2 scaling.
    std::optional<double> sep_line;
    if (p1 > 0.0 && tau_f > 0.0) {
        try {
            sep_line = separatrix_boundary_p2(p1, params, drive, tau_f / p2);
        } catch (const NumericError&) {
            sep_line.reset();
        }
    }
    if (sep_line) {
        if (near_line(*sep_line)) return RegimeLabel::boundary_zone;
        if (p2 < *sep_line) return RegimeLabel::large_separatrix;
    }

    if (near_line(separation_p2(p1, params.p3))) return RegimeLabel::boundary_zone;
    return RegimeLabel::autoresonance;
}

// ------------------------- moderate lattice sizes -----------------------------

// Ladder structure for moderate N: the accessible pathway ends at
// l_max = floor(N/4) + 1; when N is divisible by 4 the last two crossings
// coincide (three-level "bow tie"), with double-transition efficiency
// (1 - exp(-pi p1^2))^2.
struct ModerateNSchedule {
    int d = 0;             // floor(N/4)
    int l_max = 1;
    double min_gap = 0.0;  // smallest usable time between consecutive crossings
    bool bow_tie = false;
    bool lc_feasible = false;
};

inline double bow_tie_efficiency(double p1) {
    const double single = 1.0 - std::exp(-pi * p1 * p1);
    return single * single;
}

inline ModerateNSchedule moderate_n_rules(const DimensionlessParams& params) {
    params.validate();
    const int n = params.n_sites;
    ModerateNSchedule m;
    m.d = n / 4;
    m.l_max = m.d + 1;
    m.bow_tie = (n % 4 == 0);
    if (n <= 4) {
        m.min_gap = crossing_time(1, params);
    } else if (!m.bow_tie) {
        m.min_gap = crossing_time(m.l_max, params) - crossing_time(m.l_max - 1, params);
    } else {
        m.min_gap = crossing_time(m.l_max - 1, params) - crossing_time(m.l_max - 2, params);
    }
    m.lc_feasible = m.min_gap > transition_duration(params.p1, params.p3);
    return m;
}

// ------------------------------ boundary curves -------------------------------

struct RegimeBoundaries {
    double p1cr_lz = 0.0;        // 50% single-crossing threshold
    double p1cr_nlz = 0.0;       // sharp nonlinear threshold (inf for p3 = 0)
    double p1cr_ladder = 0.0;    // r-crossing ladder threshold
    double delta_tau = 0.0;      // transition duration estimate
    double p2_separation = 0.0;  // separation criterion RHS
    double p1p2_ar = 0.25;       // phase-locking threshold product
    std::function<double(double)> separatrix_p2_of_p1;  // set by the curve overload
};

inline RegimeBoundaries evaluate_boundaries(double p1, double p3, int ladder_r) {
    RegimeBoundaries b;
    b.p1cr_lz = lz_half_transfer_p1();
    b.p1cr_nlz = (p3 > 0.0) ? nlz_threshold(p3) : std::numeric_limits<double>::infinity();
    b.p1cr_ladder = ladder_threshold(ladder_r, p3);
    b.delta_tau = transition_duration(p1, p3);
    b.p2_separation = separation_p2(p1, p3);
    return b;
}

// Variant that also binds the separatrix boundary curve for a given lattice
// and tau_f = tau_factor * p2 run convention.
inline RegimeBoundaries evaluate_boundaries(double p1, double p3, int ladder_r,
                                            const DimensionlessParams& proto,
                                            const DriveSchedule& drive, double tau_factor) {
    RegimeBoundaries b = evaluate_boundaries(p1, p3, ladder_r);
    b.separatrix_p2_of_p1 = [proto, drive, tau_factor](double q1) {
        return separatrix_boundary_p2(q1, proto, drive, tau_factor);
    };
    return b;
}

}  // namespace chirplat
