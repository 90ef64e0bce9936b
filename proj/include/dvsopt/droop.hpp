#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dvsopt/network.hpp"
#include "dvsopt/rng.hpp"
#include "dvsopt/types.hpp"

namespace dvsopt {

/// Symmetric linear droop with saturation: i_q = clamp(eps*(v - v_n), +-i_max).
struct DroopRule {
    double epsilon = 0.0;
    double v_n = 1.0;
    double i_max = 0.0;

    DroopRule() = default;

    DroopRule(double epsilon_, double v_n_, double i_max_)
        : epsilon(epsilon_), v_n(v_n_), i_max(i_max_) {
        if (!(epsilon > 0.0) || !(v_n > 0.0) || !(i_max > 0.0))
            throw PreconditionViolated("DroopRule requires epsilon > 0, v_n > 0, i_max > 0");
    }
};

/// What kind of point the closed-loop equilibrium is, seen through the
/// reverse-engineered objective F (and the voltage curve itself).
enum class EquilibriumClass {
    UNIQUE_RE_OPTIMUM, ///< unique minimizer of the convex reverse-engineered objective
    LOCAL_MIN_RE,      ///< local (not certified global) minimizer of a nonconvex F
    LOCAL_MAX_RE,      ///< local maximizer of a nonconvex F
    VOLTAGE_OPTIMAL,   ///< sits at the voltage maximum (grad V ~ 0)
    SATURATED,         ///< pinned at i_q = -i_max
    INDETERMINATE      ///< curvature test inconclusive (|d2F| below tolerance)
};

struct EquilibriumReport {
    double i_q_star = 0.0;
    double v_star = 0.0;
    double residual = 0.0;
    int iterations = 0;
    EquilibriumClass classification = EquilibriumClass::UNIQUE_RE_OPTIMUM;
    bool c4_holds = false;
};

/// The droop law itself.
inline double droop_target(const DroopRule& rule, double v) {
    return std::clamp(rule.epsilon * (v - rule.v_n), -rule.i_max, rule.i_max);
}

/// Voltage restricted to the reactive axis (i_d = 0):
///   V(i_q) = sqrt(vg^2 - (r i_q)^2) - x i_q.
inline double axis_voltage(const GridModel& g, double i_q) {
    return std::sqrt(g.vg * g.vg - (g.r * i_q) * (g.r * i_q)) - g.x * i_q;
}

/// dV/di_q on the reactive axis.
inline double axis_voltage_slope(const GridModel& g, double i_q) {
    return -g.r * g.r * i_q / std::sqrt(g.vg * g.vg - (g.r * i_q) * (g.r * i_q)) - g.x;
}

/// d2V/di_q^2 on the reactive axis (always negative: V is strictly concave).
inline double axis_voltage_curvature(const GridModel& g, double i_q) {
    return -g.r * g.r * g.vg * g.vg
           / std::pow(g.vg * g.vg - (g.r * i_q) * (g.r * i_q), 1.5);
}

/// Condition C4: the saturated point -i_max sits left of the voltage peak,
/// i.e. i_max < x*vg/(r*z).
inline bool c4_holds(const GridModel& g, double i_max) {
    return i_max < g.x * g.vg / (g.r * g.z);
}

/// Reverse-engineered objective F(i_q) = eta/2 (V - v_n)^2 + i_q^2 / (2 eps).
inline double re_objective(const GridModel& g, const DroopRule& rule, double eta, double i_q) {
    const double dv = axis_voltage(g, i_q) - rule.v_n;
    return 0.5 * eta * dv * dv + i_q * i_q / (2.0 * rule.epsilon);
}

namespace detail {

inline EquilibriumClass classify_equilibrium(const GridModel& g, const DroopRule& rule,
                                             double iq_star, bool saturated, bool c4) {
    if (saturated) return EquilibriumClass::SATURATED;
    if (c4) return EquilibriumClass::UNIQUE_RE_OPTIMUM;
    const double slope = axis_voltage_slope(g, iq_star);
    if (std::abs(slope) <= 1e-5) return EquilibriumClass::VOLTAGE_OPTIMAL;
    if (slope < 0.0) return EquilibriumClass::UNIQUE_RE_OPTIMUM;
    // Ascending-voltage side: F built from eta = -1/slope is nonconvex; judge
    // the stationary point by its curvature.
    const double eta = -1.0 / slope;
    const double d2f = eta * (slope * slope
                              + (axis_voltage(g, iq_star) - rule.v_n)
                                    * axis_voltage_curvature(g, iq_star))
                       + 1.0 / rule.epsilon;
    if (std::abs(d2f) < 1e-10) return EquilibriumClass::INDETERMINATE;
    return d2f > 0.0 ? EquilibriumClass::LOCAL_MIN_RE : EquilibriumClass::LOCAL_MAX_RE;
}

} // namespace detail

/// Closed-loop equilibrium of the droop law on the reactive axis, found by
/// the damped fixed point  x <- x/2 + clamp(eps*(V(x) - v_n))/2  from the
/// given start. Requires i_max < vg/r (otherwise the axis itself leaves the
/// stability region). Converged equilibria satisfy
/// |i_q* - droop_target(V(i_q*))| <= 1e-10.
inline EquilibriumReport find_equilibrium(const GridModel& g, const DroopRule& rule,
                                          double start = 0.0) {
    if (rule.i_max >= g.vg / g.r)
        throw AssumptionViolated("droop analysis requires i_max < vg/r");
    double x = start;
    int it = 0;
    bool converged = false;
    for (; it < 10000; ++it) {
        const double t = droop_target(rule, axis_voltage(g, x));
        const double xn = 0.5 * x + 0.5 * t;
        if (std::abs(xn - x) < 1e-12) {
            x = xn;
            converged = true;
            break;
        }
        x = xn;
    }
    // The damped loop only approaches a saturated equilibrium geometrically;
    // when the clamp is active and self-consistent the exact fixed point is
    // the clamp bound itself, so land on it.
    const double t = droop_target(rule, axis_voltage(g, x));
    if ((t == rule.i_max || t == -rule.i_max)
        && droop_target(rule, axis_voltage(g, t)) == t)
        x = t;
    EquilibriumReport rep;
    rep.i_q_star = x;
    rep.v_star = axis_voltage(g, x);
    rep.residual = std::abs(x - droop_target(rule, rep.v_star));
    rep.iterations = it;
    if (!converged || rep.residual > 1e-10)
        throw NonConvergence("droop fixed point did not converge (last iterates "
                             + std::to_string(x) + ", "
                             + std::to_string(droop_target(rule, rep.v_star)) + ")");
    rep.c4_holds = c4_holds(g, rule.i_max);
    const bool saturated = std::abs(rep.i_q_star) >= rule.i_max - 1e-12;
    rep.classification =
        detail::classify_equilibrium(g, rule, rep.i_q_star, saturated, rep.c4_holds);
    return rep;
}

/// Equilibria reached from n random starts in [-i_max, i_max] (for basin
/// exploration when F may be nonconvex). Distinct equilibria are collapsed
/// at 1e-8 resolution.
inline std::vector<EquilibriumReport> multi_start_equilibria(const GridModel& g,
                                                             const DroopRule& rule,
                                                             int n = 20,
                                                             std::uint64_t seed = 0) {
    std::vector<EquilibriumReport> out;
    for (int i = 0; i < n; ++i) {
        const double start = rng::uniform(-rule.i_max, rule.i_max, seed, 0xD4,
                                          static_cast<std::uint64_t>(i), 0);
        const EquilibriumReport rep = find_equilibrium(g, rule, start);
        bool known = false;
        for (const auto& r : out)
            if (std::abs(r.i_q_star - rep.i_q_star) <= 1e-8) known = true;
        if (!known) out.push_back(rep);
    }
    return out;
}

/// Smallest gain for which the saturated point -i_max is the equilibrium:
///   eps_sat = -i_max / (sqrt(vg^2 - (r i_max)^2) + x i_max - v_n).
/// Requires C4 and a below-nominal saturated voltage (denominator < 0).
inline double droop_gain_threshold(const GridModel& g, double v_n, double i_max) {
    if (!c4_holds(g, i_max))
        throw AssumptionViolated("gain threshold requires the saturated point below the peak (C4)");
    const double den = std::sqrt(g.vg * g.vg - (g.r * i_max) * (g.r * i_max))
                     + g.x * i_max - v_n;
    if (den >= 0.0)
        throw AssumptionViolated("gain threshold requires V(-i_max) < v_n");
    return -i_max / den;
}

/// The unique gain whose equilibrium sits exactly at the voltage peak:
///   eps_opt = x vg / (r z v_n - z^2 vg).
/// Meaningful when the peak is reachable (i_max >= x vg/(r z), i.e. C4 fails)
/// and the denominator is positive.
inline double exact_optimal_gain(const GridModel& g, double v_n) {
    const double den = g.r * g.z * v_n - g.z * g.z * g.vg;
    if (den <= 0.0)
        throw AssumptionViolated("optimal gain undefined: r z v_n - z^2 vg <= 0");
    return g.x * g.vg / den;
}

/// Where the axis voltage is maximized over [-i_max, i_max] and its value:
/// the saturated end (-i_max, V(-i_max)) under C4, otherwise the interior
/// peak (-x vg/(r z), z vg / r).
inline std::pair<double, double> max_droop_voltage(const GridModel& g, double i_max) {
    if (i_max >= g.vg / g.r)
        throw AssumptionViolated("droop analysis requires i_max < vg/r");
    if (c4_holds(g, i_max))
        return {-i_max, axis_voltage(g, -i_max)};
    return {-g.x * g.vg / (g.r * g.z), g.z * g.vg / g.r};
}

} // namespace dvsopt
