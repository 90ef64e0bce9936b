#pragma once

#include <cmath>
#include <limits>

#include "dvsopt/network.hpp"
#include "dvsopt/types.hpp"

namespace dvsopt {

enum class Stage { S1, S2, S3 };

/// Analytic boundaries between the three regimes of the voltage-support
/// optimum, all expressed in the active convention's power units.
struct StageThresholds {
    double p_b = 0.0;  ///< power boundary between S1 and S2
    double i_b = 0.0;  ///< current boundary between S2 and S3
    double p_b_prime = std::numeric_limits<double>::quiet_NaN(); ///< S2/S3 power boundary (C3 grids only)
    double nu = 0.0;   ///< sqrt(vg^2 + 4 r p_max / k), shared by i_b and the S3 solution
    bool c3_holds = false;
};

/// A solved voltage-support problem: regime, optimal setpoint and the
/// operating point it produces, plus the thresholds that picked the regime.
struct StageSolution {
    Stage stage = Stage::S1;
    CurrentSetpoint setpoint;
    OperatingPoint op;
    StageThresholds thresholds;
    double phi_star = std::numeric_limits<double>::quiet_NaN(); ///< setpoint angle, degrees (S2 only)
};

/// Regime thresholds:
///   p_b       = k ((r/z) vg i_max + r i_max^2)
///   i_b       = sqrt(vg^2/(2 r^2) + p_max/(k r) + (x^2 - r^2)/(2 r^2 z^2) vg nu)
///   c3        = (x/r)(vg/z) < i_max
///   p_b_prime = (k/4r) (t^2 - vg^2),  t = (r^2 - x^2)/z^2 vg + 2r sqrt(i_max^2 - x^2 vg^2 / z^4)
/// p_b_prime is only meaningful on C3 grids and is NaN otherwise.
inline StageThresholds compute_thresholds(const GridModel& g, const PowerConvention& c,
                                          const InverterLimits& lim) {
    const double r = g.r, x = g.x, z = g.z, vg = g.vg;
    const double k = c.k;
    const double imax = lim.i_max;

    StageThresholds th;
    th.p_b = k * ((r / z) * vg * imax + r * (imax * imax));
    th.nu = std::sqrt(vg * vg + 4.0 * r * lim.p_max / k);
    double ib2 = vg * vg / (2.0 * r * r) + lim.p_max / (k * r)
               + (x * x - r * r) / (2.0 * r * r * z * z) * vg * th.nu;
    // ib2 is a sum of squares in exact arithmetic; clamp float dust.
    if (ib2 < 0.0) ib2 = 0.0;
    th.i_b = std::sqrt(ib2);
    th.c3_holds = (x / r) * (vg / z) < imax;
    if (th.c3_holds) {
        const double t = (r * r - x * x) / (z * z) * vg
                       + 2.0 * r * std::sqrt(imax * imax - x * x * vg * vg / std::pow(z, 4.0));
        th.p_b_prime = k / (4.0 * r) * (t * t - vg * vg);
    }
    return th;
}

/// Regime choice: S1 iff p_max >= p_b, else S3 iff i_max >= i_b, else S2.
/// Ties resolve to the earlier branch (boundary coincidences are resolution
/// noise; the regimes are mutually exclusive in exact arithmetic).
inline Stage decide_stage(const StageThresholds& th, const InverterLimits& lim) {
    if (lim.p_max >= th.p_b) return Stage::S1;
    if (lim.i_max >= th.i_b) return Stage::S3;
    return Stage::S2;
}

/// S1 optimum: full current along the symmetry direction (r, -x)/z.
/// The resulting voltage is vg + z*i_max; the setpoint depends on neither vg
/// nor the power band. The regime precondition (p_max >= p_b) is checked in
/// the given convention (pu by default).
inline CurrentSetpoint solve_s1(const GridModel& g, const InverterLimits& lim,
                                const PowerConvention& c = {}) {
    if (lim.p_max < compute_thresholds(g, c, lim).p_b)
        throw PreconditionViolated("S1 requires the power cap above the boundary power p_b");
    return {(g.r / g.z) * lim.i_max, -(g.x / g.z) * lim.i_max};
}

/// S3 optimum: the interior point where the power cap binds and dV/di_q = 0,
///   i_d = (nu - vg)/(2z),  i_q = -(x/(2rz))(vg + nu),  nu = sqrt(vg^2 + 4 r p_max / k).
/// Throws PreconditionViolated when the closed form lies outside the current
/// disc (i_max < i_b).
inline CurrentSetpoint solve_s3(const GridModel& g, const PowerConvention& c,
                                const InverterLimits& lim) {
    const StageThresholds th = compute_thresholds(g, c, lim);
    if (lim.i_max < th.i_b - 1e-12)
        throw PreconditionViolated("S3 closed form lies outside the current disc (i_max < i_b)");
    const double nu = th.nu;
    return {(nu - g.vg) / (2.0 * g.z), -(g.x / (2.0 * g.r * g.z)) * (g.vg + nu)};
}

namespace detail {

/// Power along the current boundary: P(phi) = k * V(i_max cos, i_max sin) * i_max cos.
inline double boundary_power(const GridModel& g, const PowerConvention& c, double imax,
                             double phi) {
    const CurrentSetpoint u{imax * std::cos(phi), imax * std::sin(phi)};
    return c.k * pcc_voltage(g, u) * u.i_d;
}

} // namespace detail

/// S2 optimum: the point on the current boundary where P = p_max, angle
/// phi_star found by bisection on [phi_lo, phi'], phi' = atan2(-x/z, r/z).
/// When r*i_max > vg the angle -90 deg is stability-infeasible, so phi_lo is
/// the fourth-quadrant intersection of the dV/di_q = 0 line with the current
/// circle; the whole arc [phi_lo, phi'] is then stability-feasible.
/// Returns {setpoint, phi_star in degrees}; throws RootNotBracketed when the
/// bracket carries no sign change (regime precondition violated).
inline std::pair<CurrentSetpoint, double> solve_s2(const GridModel& g, const PowerConvention& c,
                                                   const InverterLimits& lim) {
    const double imax = lim.i_max;
    const double phi_hi = std::atan2(-g.x / g.z, g.r / g.z);
    double phi_lo;
    if (g.r * imax > g.vg) {
        const double cc = -g.x * g.vg / g.z;
        const double z2 = g.z * g.z;
        const double foot_d = cc * g.x / z2;
        const double foot_q = cc * g.r / z2;
        const double len = std::sqrt(imax * imax - (cc / g.z) * (cc / g.z));
        phi_lo = std::atan2(foot_q - len * g.x / g.z, foot_d + len * g.r / g.z);
    } else {
        phi_lo = -M_PI / 2.0;
    }
    const double flo = detail::boundary_power(g, c, imax, phi_lo) - lim.p_max;
    const double fhi = detail::boundary_power(g, c, imax, phi_hi) - lim.p_max;
    if (flo > 0.0 || fhi < 0.0)
        throw RootNotBracketed("no boundary angle reaches the power cap in [phi_lo, phi']");
    double lo = phi_lo, hi = phi_hi;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (detail::boundary_power(g, c, imax, mid) - lim.p_max < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double phi = 0.5 * (lo + hi);
    return {CurrentSetpoint{imax * std::cos(phi), imax * std::sin(phi)},
            phi * 180.0 / M_PI};
}

/// Full solve: pick the regime from the thresholds, dispatch, and return the
/// setpoint together with its operating point. The returned point always
/// satisfies the feasibility envelope (checked before returning).
inline StageSolution solve(const GridModel& g, const PowerConvention& c,
                           const InverterLimits& lim) {
    StageSolution sol;
    sol.thresholds = compute_thresholds(g, c, lim);
    sol.stage = decide_stage(sol.thresholds, lim);
    switch (sol.stage) {
    case Stage::S1:
        sol.setpoint = solve_s1(g, lim, c);
        break;
    case Stage::S3:
        sol.setpoint = solve_s3(g, c, lim);
        break;
    case Stage::S2: {
        auto [u, phi] = solve_s2(g, c, lim);
        sol.setpoint = u;
        sol.phi_star = phi;
        break;
    }
    }
    sol.op = operating_point(g, c, sol.setpoint);
    if (!(sol.op.s_margin <= 0.0) || !(sol.op.v >= 0.0) ||
        !(sol.op.i <= lim.i_max + 1e-9) ||
        !(sol.op.p <= lim.p_max + 1e-9) || !(sol.op.p >= lim.p_min - 1e-9))
        throw Error("internal: solved setpoint violates the feasibility envelope");
    return sol;
}

} // namespace dvsopt
