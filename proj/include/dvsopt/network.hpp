#pragma once

#include <cmath>
#include <utility>

#include "dvsopt/types.hpp"

namespace dvsopt {

/// Series voltage drop in quadrature with the PCC phasor: w = r*i_q + x*i_d.
/// The PCC voltage is real-valued iff |w| <= vg.
inline double quadrature_drop(const GridModel& g, const CurrentSetpoint& u) {
    return g.r * u.i_q + g.x * u.i_d;
}

/// Stability margin S = |r*i_q + x*i_d| - vg. Nonpositive values mean the
/// setpoint admits a synchronized (real-voltage) solution.
inline double stability_margin(const GridModel& g, const CurrentSetpoint& u) {
    return std::abs(quadrature_drop(g, u)) - g.vg;
}

namespace detail {

/// vg^2 - w^2 with the boundary clamp: values within -1e-12 of zero are
/// floating-point dust on the stability boundary and clamp to 0; anything
/// more negative is a genuine loss of synchronism.
inline double clamped_headroom(const GridModel& g, const CurrentSetpoint& u) {
    const double w = quadrature_drop(g, u);
    const double arg = g.vg * g.vg - w * w;
    if (arg < -1e-12)
        throw InfeasibleSetpoint("setpoint exceeds the stability limit (|r*i_q + x*i_d| > vg)");
    return arg < 0.0 ? 0.0 : arg;
}

} // namespace detail

/// Positive-sequence PCC voltage magnitude
///   V = sqrt(vg^2 - (r*i_q + x*i_d)^2) + r*i_d - x*i_q.
/// Throws InfeasibleSetpoint when the square root has no real value.
inline double pcc_voltage(const GridModel& g, const CurrentSetpoint& u) {
    return std::sqrt(detail::clamped_headroom(g, u)) + g.r * u.i_d - g.x * u.i_q;
}

/// Full operating point: voltage, powers, current magnitude, voltage angle,
/// and stability margin. Angle convention: theta = atan2(w, sqrt(vg^2 - w^2))
/// in degrees, which lands in [-90, 90] and closes the phasor loop
/// V exp(j theta) - (r + jx) * (i_d + j i_q) exp(j theta) = vg.
inline OperatingPoint operating_point(const GridModel& g, const PowerConvention& c,
                                      const CurrentSetpoint& u) {
    OperatingPoint o;
    o.v = pcc_voltage(g, u);
    const double w = quadrature_drop(g, u);
    o.p = c.k * o.v * u.i_d;
    o.q = -c.k * o.v * u.i_q;
    o.i = std::hypot(u.i_d, u.i_q);
    o.theta = std::atan2(w, std::sqrt(detail::clamped_headroom(g, u))) * 180.0 / M_PI;
    o.s_margin = stability_margin(g, u);
    return o;
}

/// Gradient of the PCC voltage, (dV/di_d, dV/di_q):
///   dV/di_d = r - x*w/s,   dV/di_q = -x - r*w/s,   s = sqrt(vg^2 - w^2).
/// Only defined strictly inside the stability region; throws
/// NondifferentiablePoint when |s_margin| <= 1e-10.
inline std::pair<double, double> grad_v(const GridModel& g, const CurrentSetpoint& u) {
    const double margin = stability_margin(g, u);
    if (margin > 1e-10)
        throw InfeasibleSetpoint("setpoint exceeds the stability limit (|r*i_q + x*i_d| > vg)");
    if (margin > -1e-10)
        throw NondifferentiablePoint("voltage gradient undefined on the stability boundary");
    const double w = quadrature_drop(g, u);
    const double s = std::sqrt(g.vg * g.vg - w * w);
    return {g.r - g.x * w / s, -g.x - g.r * w / s};
}

} // namespace dvsopt
