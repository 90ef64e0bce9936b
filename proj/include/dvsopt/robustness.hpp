#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dvsopt/godvs.hpp"
#include "dvsopt/network.hpp"
#include "dvsopt/rng.hpp"
#include "dvsopt/types.hpp"

namespace dvsopt {

/// Relative-error box for the impedance estimate:
/// r_est = (1+alpha) r, x_est = (1+beta) x with alpha, beta in the band.
struct UncertaintyBand {
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    double beta_lo = 0.0;
    double beta_hi = 0.0;

    static UncertaintyBand symmetric(double alpha, double beta) {
        return {-alpha, alpha, -beta, beta};
    }
};

enum class GapMode { S1_ANALYTIC, S3_OPEN_LOOP, S3_CLOSED_LOOP };

/// Optimality-gap summary for one analysis mode: G = V* - Vhat*.
struct GapReport {
    double v_true_opt = 0.0;
    double v_achieved_worst = 0.0;
    double gap_abs = 0.0;
    double gap_pct = 0.0;
    double mean_gap_pct = 0.0;
    GapMode mode = GapMode::S1_ANALYTIC;
    int trials = 0;
    int discarded_infeasible = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void validate_band(const UncertaintyBand& b) {
    if (!(b.alpha_lo <= b.alpha_hi) || !(b.beta_lo <= b.beta_hi)
        || !(b.alpha_lo > -1.0) || !(b.beta_lo > -1.0))
        throw PreconditionViolated("uncertainty band requires lo <= hi and all errors > -1");
}

} // namespace detail

/// Voltage reached on the TRUE grid when the boundary setpoint is aimed with
/// perturbed parameters: the current vector points along the perturbed
/// impedance angle with magnitude i_max. Returns (achieved V, setpoint).
inline std::pair<double, CurrentSetpoint> s1_perturbed_voltage(const GridModel& g,
                                                               double i_max,
                                                               double alpha,
                                                               double beta) {
    const double rr = (1.0 + alpha) * g.r;
    const double xx = (1.0 + beta) * g.x;
    const double zz = std::hypot(rr, xx);
    const CurrentSetpoint u{i_max * rr / zz, -i_max * xx / zz};
    return {pcc_voltage(g, u), u};
}

/// Analytic worst-case gap for the power-unconstrained stage: the extreme
/// voltage loss occurs at one of the two opposite corners of the error box,
/// (alpha_lo, beta_hi) or (alpha_hi, beta_lo).
inline GapReport s1_gap_bound(const GridModel& g, const InverterLimits& lim,
                              const UncertaintyBand& band) {
    detail::validate_band(band);
    const double v_star = g.vg + g.z * lim.i_max;
    const double v1 = s1_perturbed_voltage(g, lim.i_max, band.alpha_lo, band.beta_hi).first;
    const double v2 = s1_perturbed_voltage(g, lim.i_max, band.alpha_hi, band.beta_lo).first;
    GapReport rep;
    rep.v_true_opt = v_star;
    rep.v_achieved_worst = std::min(v1, v2);
    rep.gap_abs = v_star - rep.v_achieved_worst;
    rep.gap_pct = 100.0 * rep.gap_abs / v_star;
    rep.mean_gap_pct = rep.gap_pct;
    rep.mode = GapMode::S1_ANALYTIC;
    return rep;
}

/// One Monte-Carlo case: a sag depth / grid strength pair (the grid is built
/// from the short-circuit ratio with the given r/x).
struct McCase {
    double vg = 0.0;
    double scr = 0.0;
    double r_over_x = 2.0;
    double i_max = 1.5;
};

/// Per-case Monte-Carlo outcome: both implementation modes plus the count of
/// trials whose perturbed parameters misdecide the stage (excluded from gap
/// statistics in both modes).
struct McCaseReport {
    McCase c;
    double p_max = 0.0;
    int misdecided = 0;
    GapReport open;
    GapReport closed;
};

/// The standard case lattice: vg in {0.1,...,0.8} x SCR in {2,...,10},
/// filtered to grids where the deep-sag stage exists (condition C3).
inline std::vector<McCase> mc_default_cases(double i_max = 1.5, double r_over_x = 2.0) {
    std::vector<McCase> cases;
    for (int iv = 1; iv <= 8; ++iv) {
        const double vg = iv / 10.0;
        for (int scr = 2; scr <= 10; ++scr) {
            const GridModel g = grid_from_scr(vg, static_cast<double>(scr), r_over_x);
            if ((g.x / g.r) * (g.vg / g.z) < i_max)
                cases.push_back({vg, static_cast<double>(scr), r_over_x, i_max});
        }
    }
    return cases;
}

/// Open-loop trial: the deep-sag closed form is computed from the estimated
/// grid and applied blind. Returns the TRUE voltage, or nullopt when the
/// point is infeasible on the true grid or overshoots the power cap (such
/// trials are discarded from gap statistics).
inline std::optional<double> s3_open_loop_trial(const GridModel& g_true,
                                                const GridModel& g_est,
                                                const PowerConvention& c,
                                                const InverterLimits& lim) {
    const CurrentSetpoint u = solve_s3(g_est, c, lim);
    double v = 0.0;
    try {
        v = pcc_voltage(g_true, u);
    } catch (const InfeasibleSetpoint&) {
        return std::nullopt;
    }
    if (c.k * v * u.i_d > lim.p_max) return std::nullopt;
    return v;
}

/// Closed-loop trial: i_q is tied to i_d through the estimated boundary-line
/// relation (with the measured true vg), and i_d is bisected until the TRUE
/// power meets the cap. The bracket top is i_max shrunk to keep the tie
/// inside the true stability region (the true drop w is linear in i_d along
/// the tie). Throws RootNotBracketed when even that stretch cannot reach the
/// cap.
inline double s3_closed_loop_trial(const GridModel& g_true, const GridModel& g_est,
                                   const PowerConvention& c, const InverterLimits& lim) {
    const auto iqhat = [&](double id) {
        return -(g_est.x * id + (g_est.x / g_est.z) * g_true.vg) / g_est.r;
    };
    const auto pfun = [&](double id) {
        return c.k * pcc_voltage(g_true, {id, iqhat(id)}) * id;
    };
    const double m = g_true.x - g_true.r * g_est.x / g_est.r;
    const double b = -(g_true.r * g_est.x / (g_est.r * g_est.z)) * g_true.vg;
    double hi = lim.i_max;
    if (m < 0.0 && (-g_true.vg - b) / m < hi) hi = (-g_true.vg - b) / m;
    if (m > 0.0 && (g_true.vg - b) / m < hi) hi = (g_true.vg - b) / m;
    double lo = 0.0;
    if (pfun(lo) - lim.p_max > 0.0 || pfun(hi) - lim.p_max < 0.0)
        throw RootNotBracketed("no i_d on the tied stretch reaches the power cap");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pfun(mid) - lim.p_max < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14) break;
    }
    const double id = 0.5 * (lo + hi);
    return pcc_voltage(g_true, {id, iqhat(id)});
}

/// Seeded Monte-Carlo gap estimation over a case collection: per trial the
/// impedance errors are drawn uniformly from the band with a counter-based
/// generator (identical results regardless of evaluation order), the stage
/// is re-decided on the estimated grid (mismatches are counted and excluded),
/// and both trial types run against the true grid. Deterministic given seed.
inline std::vector<McCaseReport> monte_carlo_s3(const std::vector<McCase>& cases,
                                                const UncertaintyBand& band,
                                                int trials, double p_fraction,
                                                std::uint64_t seed,
                                                const PowerConvention& c = {}) {
    detail::validate_band(band);
    if (trials <= 0 || !(p_fraction > 0.0))
        throw PreconditionViolated("monte_carlo_s3 requires trials > 0 and p_fraction > 0");
    std::vector<McCaseReport> out;
    out.reserve(cases.size());
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const McCase& mc = cases[ci];
        const GridModel g = grid_from_scr(mc.vg, mc.scr, mc.r_over_x);
        if (!((g.x / g.r) * (g.vg / g.z) < mc.i_max))
            throw PreconditionViolated("monte_carlo_s3 case violates the deep-sag condition C3");
        const StageThresholds th = compute_thresholds(g, c, {mc.i_max, 1.0});
        const InverterLimits lim{mc.i_max, p_fraction * th.p_b_prime};
        const double nu = compute_thresholds(g, c, lim).nu;
        const double v_star = (g.z / (2.0 * g.r)) * (g.vg + nu);

        McCaseReport rep;
        rep.c = mc;
        rep.p_max = lim.p_max;
        double vmin_o = v_star, vmin_c = v_star;
        double sum_o = 0.0, sum_c = 0.0;
        int n_o = 0, n_c = 0, disc_o = 0, disc_c = 0;
        for (int t = 0; t < trials; ++t) {
            const double a = band.alpha_lo
                + (band.alpha_hi - band.alpha_lo)
                    * rng::u01(seed, static_cast<std::uint64_t>(ci),
                               static_cast<std::uint64_t>(t), 0);
            const double b = band.beta_lo
                + (band.beta_hi - band.beta_lo)
                    * rng::u01(seed, static_cast<std::uint64_t>(ci),
                               static_cast<std::uint64_t>(t), 1);
            const GridModel ge{g.vg, (1.0 + a) * g.r, (1.0 + b) * g.x};
            if (decide_stage(compute_thresholds(ge, c, lim), lim) != Stage::S3) {
                ++rep.misdecided;
                continue;
            }
            if (const auto v = s3_open_loop_trial(g, ge, c, lim)) {
                sum_o += 100.0 * (v_star - *v) / v_star;
                ++n_o;
                if (*v < vmin_o) vmin_o = *v;
            } else {
                ++disc_o;
            }
            try {
                const double vc = s3_closed_loop_trial(g, ge, c, lim);
                sum_c += 100.0 * (v_star - vc) / v_star;
                ++n_c;
                if (vc < vmin_c) vmin_c = vc;
            } catch (const Error&) {
                ++disc_c;
            }
        }
        const auto fill = [&](GapReport& r, GapMode mode, double vmin, double sum,
                              int n, int disc) {
            r.v_true_opt = v_star;
            r.v_achieved_worst = vmin;
            r.gap_abs = v_star - vmin;
            r.gap_pct = 100.0 * (v_star - vmin) / v_star;
            r.mean_gap_pct = n > 0 ? sum / n : 0.0;
            r.mode = mode;
            r.trials = trials;
            r.discarded_infeasible = rep.misdecided + disc;
            r.seed = seed;
        };
        fill(rep.open, GapMode::S3_OPEN_LOOP, vmin_o, sum_o, n_o, disc_o);
        fill(rep.closed, GapMode::S3_CLOSED_LOOP, vmin_c, sum_c, n_c, disc_c);
        out.push_back(rep);
    }
    return out;
}

/// Regime sweep of the analytic S1 bound over the standard case lattice
/// (every (vg, SCR) cell, no C3 filter — the boundary stage exists for all).
struct SweepRow {
    double vg = 0.0;
    double scr = 0.0;
    double r_over_x = 2.0;
    GapReport report;
};

inline std::vector<SweepRow> s1_regime_sweep(const UncertaintyBand& band,
                                             double i_max = 1.5,
                                             double r_over_x = 2.0) {
    detail::validate_band(band);
    std::vector<SweepRow> rows;
    for (int iv = 1; iv <= 8; ++iv) {
        const double vg = iv / 10.0;
        for (int scr = 2; scr <= 10; ++scr) {
            const GridModel g = grid_from_scr(vg, static_cast<double>(scr), r_over_x);
            SweepRow row{vg, static_cast<double>(scr), r_over_x,
                         s1_gap_bound(g, {i_max, 1.0}, band)};
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace dvsopt
