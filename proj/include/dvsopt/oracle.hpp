#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "dvsopt/network.hpp"
#include "dvsopt/types.hpp"

namespace dvsopt {

/// Result of an exhaustive lattice search over the current disc.
struct OracleResult {
    CurrentSetpoint best_setpoint;
    double best_v = 0.0;
    double grid_step = 0.0;
    std::int64_t evaluated = 0;
    std::int64_t feasible = 0;
};

/// Brute-force ground truth: evaluates V on the lattice
/// {(i_d, i_q) = (a·delta, b·delta) : |a|, |b| <= floor(i_max/delta)},
/// keeps the points satisfying every constraint of the support program
/// (current circle, stability, V >= 0, p_min <= P <= p_max; all with 1e-12
/// absolute slack), and returns the feasible argmax of V. Ties resolve to
/// the smallest i_d, then the smallest i_q, so the scan order is the result
/// order and reruns are bit-identical.
inline OracleResult grid_search(const GridModel& g, const PowerConvention& c,
                                const InverterLimits& lim, double delta) {
    if (!(delta > 0.0) || !(delta <= 0.05))
        throw PreconditionViolated("grid_search requires 0 < delta <= 0.05");
    const auto n = static_cast<std::int64_t>(std::floor(lim.i_max / delta));
    OracleResult res;
    res.grid_step = delta;
    res.best_v = -std::numeric_limits<double>::infinity();
    const double i2cap = lim.i_max * lim.i_max + 1e-12;
    for (std::int64_t a = -n; a <= n; ++a) {
        const double id = static_cast<double>(a) * delta;
        for (std::int64_t b = -n; b <= n; ++b) {
            const double iq = static_cast<double>(b) * delta;
            ++res.evaluated;
            if (id * id + iq * iq > i2cap) continue;
            const double w = g.r * iq + g.x * id;
            const double arg = g.vg * g.vg - w * w;
            if (arg < -1e-12) continue;
            const double v = std::sqrt(std::max(arg, 0.0)) + g.r * id - g.x * iq;
            if (v < -1e-12) continue;
            const double p = c.k * v * id;
            if (p > lim.p_max + 1e-12 || p < lim.p_min - 1e-12) continue;
            ++res.feasible;
            if (v > res.best_v) {
                res.best_v = v;
                res.best_setpoint = {id, iq};
            }
        }
    }
    return res;
}

/// Independent check that a candidate lies on both S2 active constraints:
/// returns (I(u) - i_max, P(u) - p_max). Both within 1e-9 certifies an S2
/// candidate produced elsewhere.
inline std::pair<double, double> s2_substitution_check(const GridModel& g,
                                                       const PowerConvention& c,
                                                       const InverterLimits& lim,
                                                       const CurrentSetpoint& u) {
    const double i = std::hypot(u.i_d, u.i_q);
    const double p = c.k * pcc_voltage(g, u) * u.i_d;
    return {i - lim.i_max, p - lim.p_max};
}

} // namespace dvsopt
