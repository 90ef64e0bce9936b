#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "dvsopt/godvs.hpp"
#include "dvsopt/network.hpp"
#include "dvsopt/rng.hpp"
#include "dvsopt/types.hpp"

namespace dvsopt {

enum class Controller { DROOP_GERMAN, ODVS_PRIOR, GODVS };

enum class Phase { PREFAULT, DETECTED, MEASURING, SUPPORTING };

/// A quasi-static sag event: the prefault grid, the sagged grid it collapses
/// to at t_sag, the inverter envelope, and the ride-through controller.
struct ScenarioConfig {
    GridModel grid_prefault;
    GridModel grid_fault;
    InverterLimits limits;
    PowerConvention convention;
    Controller controller = Controller::GODVS;
    double f_nominal = 60.0;
    int m_cycles = 3;
    double detect_threshold = 0.85;
    double detect_delay_cycles = 0.39;
    double t_sag = 0.0;
    double vg_noise_pct = 0.0;
    std::uint64_t seed = 1;
};

/// One row of the event timeline. When the setpoint has no synchronized
/// solution (sync_lost), op.v/p/q/theta are NaN while op.i and op.s_margin
/// stay real (they are defined regardless of feasibility).
struct TimelineRecord {
    double t = 0.0;
    Phase phase = Phase::PREFAULT;
    CurrentSetpoint setpoint;
    OperatingPoint op;
    std::optional<Stage> stage;
    bool sync_lost = false;
};

struct ScenarioSummary {
    std::optional<double> final_v;
    std::optional<Stage> stage;
    bool sync_lost = false;
    double vg_estimate = 0.0; ///< measured grid voltage used by the controller
    double p_latched = 0.0;   ///< prefault power latched as the fault-period cap
};

struct ScenarioResult {
    std::vector<TimelineRecord> timeline;
    ScenarioSummary summary;
};

inline void validate_scenario_config(const ScenarioConfig& cfg) {
    for (const GridModel* g : {&cfg.grid_prefault, &cfg.grid_fault})
        if (!(g->vg > 0.0) || !(g->r > 0.0) || !(g->x > 0.0) || !(g->z > 0.0))
            throw ConfigInvalid("grid models require vg > 0, r > 0, x > 0");
    if (!(cfg.limits.i_max > 0.0) || !(cfg.limits.p_max > 0.0)
        || !(cfg.limits.p_min <= 0.0))
        throw ConfigInvalid("limits require i_max > 0, p_max > 0, p_min <= 0");
    if (cfg.m_cycles < 1)
        throw ConfigInvalid("m_cycles must be >= 1");
    if (!(cfg.detect_threshold > 0.0) || !(cfg.detect_threshold < 1.0))
        throw ConfigInvalid("detect_threshold must lie in (0, 1)");
    if (!(cfg.f_nominal > 0.0))
        throw ConfigInvalid("f_nominal must be positive");
    if (cfg.detect_delay_cycles < 0.0)
        throw ConfigInvalid("detect_delay_cycles must be >= 0");
    if (!(cfg.t_sag > 0.0))
        throw ConfigInvalid("t_sag must be positive");
    if (!(cfg.vg_noise_pct >= 0.0))
        throw ConfigInvalid("vg_noise_pct must be >= 0");
}

/// Grid-voltage measurement taken during the zero-current window: at
/// u = (0, 0) the PCC voltage equals the grid voltage exactly, perturbed by
/// a seeded uniform noise draw in +-vg_noise_pct percent.
inline double estimate_grid_voltage(const ScenarioConfig& cfg) {
    const double d = 2.0 * rng::u01(cfg.seed, 0xE57, 0, 0) - 1.0;
    return cfg.grid_fault.vg * (1.0 + (cfg.vg_noise_pct / 100.0) * d);
}

namespace detail {

/// Prefault operating current: pure active injection (i_q = 0) with i_d
/// bisected until the prefault-grid power meets the requested level.
inline double mppt_current(const GridModel& g, const PowerConvention& c, double p_target,
                           double i_max) {
    const auto f = [&](double id) {
        return c.k * pcc_voltage(g, {id, 0.0}) * id - p_target;
    };
    double lo = 0.0, hi = i_max;
    if (f(hi) < 0.0)
        throw PreconditionViolated("prefault power target unreachable within the current cap");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Operating point for a record that may have lost synchronism: infeasible
/// setpoints yield NaN voltage-side quantities with real i and s_margin.
inline std::pair<OperatingPoint, bool> record_op(const GridModel& g,
                                                 const PowerConvention& c,
                                                 const CurrentSetpoint& u) {
    try {
        return {operating_point(g, c, u), false};
    } catch (const InfeasibleSetpoint&) {
        OperatingPoint o;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        o.v = nan;
        o.p = nan;
        o.q = nan;
        o.theta = nan;
        o.i = std::hypot(u.i_d, u.i_q);
        o.s_margin = stability_margin(g, u);
        return {o, true};
    }
}

/// The German grid-code reactive-current curve: full injection below 0.5 pu,
/// linear between 0.5 and the 0.9 deadband edge, zero above.
inline double german_iq(double v, double i_max) {
    if (v <= 0.5) return -i_max;
    if (v < 0.9) return (i_max / 0.4) * (v - 0.9);
    return 0.0;
}

struct GermanResult {
    CurrentSetpoint u;
    double v = 0.0;
    int iterations = 0;
    bool lost = false;
};

/// Damped fixed point of the coupled (V, i_q, i_d) German-rule system on the
/// fault grid, started from the sagged grid voltage. The active current
/// fills the headroom left by the reactive priority, capped by the power
/// latch. An infeasible iterate (or negative voltage) means the rule drives
/// the system out of the synchronizable set.
inline GermanResult german_fixed_point(const GridModel& g, const PowerConvention& c,
                                       double i_max, double p_bar) {
    double v = g.vg;
    GermanResult res;
    for (int it = 0; it < 10000; ++it) {
        res.iterations = it;
        const double iq = german_iq(v, i_max);
        const double head = std::sqrt(std::max(i_max * i_max - iq * iq, 0.0));
        const double id = v > 1e-12 ? std::min(head, p_bar / (c.k * v)) : head;
        res.u = {id, iq};
        double vn = 0.0;
        try {
            vn = pcc_voltage(g, res.u);
        } catch (const InfeasibleSetpoint&) {
            res.lost = true;
            return res;
        }
        if (vn < 0.0) {
            res.lost = true;
            return res;
        }
        const double vnew = 0.5 * v + 0.5 * vn;
        if (std::abs(vnew - v) < 1e-12) {
            res.v = vnew;
            return res;
        }
        v = vnew;
    }
    res.v = v;
    return res;
}

/// Prior-art boundary search: the controller stays on the current circle and
/// seeks P = p_bar with a clamped-sqrt continuation of V (the arc need not
/// be synchronizable — that is exactly the failure mode being modeled).
inline CurrentSetpoint prior_art_boundary(const GridModel& g, const PowerConvention& c,
                                          double i_max, double p_bar) {
    const double phi_hi = std::atan2(-g.x / g.z, g.r / g.z);
    const auto pfun = [&](double phi) {
        const CurrentSetpoint u{i_max * std::cos(phi), i_max * std::sin(phi)};
        const double w = g.r * u.i_q + g.x * u.i_d;
        const double v = std::sqrt(std::max(g.vg * g.vg - w * w, 0.0)) + g.r * u.i_d
                       - g.x * u.i_q;
        return c.k * std::max(v, 0.0) * u.i_d;
    };
    double lo = -M_PI / 2.0, hi = phi_hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pfun(mid) - p_bar < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double phi = 0.5 * (lo + hi);
    return {i_max * std::cos(phi), i_max * std::sin(phi)};
}

} // namespace detail

/// Prefault power measurement latched as the fault-period power cap.
inline double latch_available_power(const ScenarioConfig& cfg) {
    const double id = detail::mppt_current(cfg.grid_prefault, cfg.convention,
                                           cfg.limits.p_max, cfg.limits.i_max);
    return cfg.convention.k * pcc_voltage(cfg.grid_prefault, {id, 0.0}) * id;
}

/// Run the sag event end to end. Timeline: the prefault point, the sag
/// landing on that same setpoint, detection after detect_delay_cycles, the
/// zero-current measurement window of m_cycles, and the controller's
/// steady-state support point. If the sagged voltage never crosses the
/// detection threshold the event ends undetected after two records.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    validate_scenario_config(cfg);
    const GridModel& gp = cfg.grid_prefault;
    const GridModel& gf = cfg.grid_fault;
    const PowerConvention& c = cfg.convention;

    ScenarioResult res;
    const double id_pre = detail::mppt_current(gp, c, cfg.limits.p_max, cfg.limits.i_max);
    const CurrentSetpoint u_pre{id_pre, 0.0};
    const double p_bar = c.k * pcc_voltage(gp, u_pre) * id_pre;
    res.summary.p_latched = p_bar;

    res.timeline.push_back({0.0, Phase::PREFAULT, u_pre,
                            operating_point(gp, c, u_pre), std::nullopt, false});

    const auto [op_sag, lost_sag] = detail::record_op(gf, c, u_pre);
    res.timeline.push_back({cfg.t_sag, Phase::PREFAULT, u_pre, op_sag, std::nullopt,
                            lost_sag});

    const bool detected = lost_sag || op_sag.v <= cfg.detect_threshold;
    if (!detected) {
        res.summary.final_v = op_sag.v;
        res.summary.sync_lost = lost_sag;
        return res;
    }

    const double t_det = cfg.t_sag + cfg.detect_delay_cycles / cfg.f_nominal;
    res.timeline.push_back({t_det, Phase::DETECTED, u_pre, op_sag, std::nullopt,
                            lost_sag});

    const CurrentSetpoint u_zero{0.0, 0.0};
    res.timeline.push_back({t_det, Phase::MEASURING, u_zero,
                            operating_point(gf, c, u_zero), std::nullopt, false});

    const double vg_est = estimate_grid_voltage(cfg);
    res.summary.vg_estimate = vg_est;
    const InverterLimits lim{cfg.limits.i_max, p_bar, cfg.limits.p_min};
    const double t_sup = t_det + cfg.m_cycles / cfg.f_nominal;

    TimelineRecord sup;
    sup.t = t_sup;
    sup.phase = Phase::SUPPORTING;
    switch (cfg.controller) {
    case Controller::GODVS: {
        const GridModel ge{vg_est, gf.r, gf.x};
        const StageSolution sol = solve(ge, c, lim);
        sup.setpoint = sol.setpoint;
        sup.stage = sol.stage;
        break;
    }
    case Controller::DROOP_GERMAN: {
        const detail::GermanResult gr =
            detail::german_fixed_point(gf, c, lim.i_max, p_bar);
        sup.setpoint = gr.u;
        break;
    }
    case Controller::ODVS_PRIOR: {
        const GridModel ge{vg_est, gf.r, gf.x};
        const StageThresholds th = compute_thresholds(ge, c, lim);
        if (lim.p_max >= th.p_b) {
            sup.setpoint = solve_s1(ge, lim, c);
            sup.stage = Stage::S1;
        } else {
            sup.setpoint = detail::prior_art_boundary(ge, c, lim.i_max, p_bar);
            sup.stage = Stage::S2;
        }
        break;
    }
    }
    const auto [op_sup, lost_sup] = detail::record_op(gf, c, sup.setpoint);
    sup.op = op_sup;
    sup.sync_lost = lost_sup;
    if (lost_sup) sup.stage.reset();
    res.timeline.push_back(sup);

    res.summary.sync_lost = lost_sup;
    res.summary.stage = sup.stage;
    if (!lost_sup) res.summary.final_v = op_sup.v;
    return res;
}

} // namespace dvsopt
