#pragma once

#include <cmath>

#include "dvsopt/errors.hpp"

namespace dvsopt {

/// Thevenin equivalent of the sagged grid as seen from the PCC:
/// source magnitude vg behind the impedance r + jx (all per-unit).
struct GridModel {
    double vg = 0.0;
    double r = 0.0;
    double x = 0.0;
    double z = 0.0; ///< cached |r + jx|

    GridModel() = default;

    GridModel(double vg_, double r_, double x_) : vg(vg_), r(r_), x(x_) {
        if (!(vg > 0.0) || !(r > 0.0) || !(x > 0.0))
            throw PreconditionViolated("GridModel requires vg > 0, r > 0, x > 0");
        z = std::hypot(r, x);
    }
};

/// Build a grid from strength (short-circuit ratio, z = 1/scr) and r/x ratio.
inline GridModel grid_from_scr(double vg, double scr, double r_over_x = 2.0) {
    const double z = 1.0 / scr;
    const double x = z / std::sqrt(1.0 + r_over_x * r_over_x);
    const double r = r_over_x * x;
    return GridModel(vg, r, x);
}

/// Scalar k in p = k * v * i_d: 1 for per-unit quantities, 3/2 for
/// SI peak-phasor quantities.
struct PowerConvention {
    double k = 1.0;

    static PowerConvention pu() { return PowerConvention{1.0}; }
    static PowerConvention si() { return PowerConvention{1.5}; }
};

/// Inverter envelope: current magnitude cap and active-power band.
struct InverterLimits {
    double i_max = 0.0;
    double p_max = 0.0;
    double p_min = 0.0;

    InverterLimits() = default;

    InverterLimits(double i_max_, double p_max_, double p_min_ = 0.0)
        : i_max(i_max_), p_max(p_max_), p_min(p_min_) {
        if (!(i_max > 0.0) || !(p_max > 0.0) || !(p_min <= 0.0))
            throw PreconditionViolated(
                "InverterLimits requires i_max > 0, p_max > 0, p_min <= 0");
    }
};

/// The two controllable currents in the voltage-oriented dq frame.
struct CurrentSetpoint {
    double i_d = 0.0;
    double i_q = 0.0;
};

/// Everything observable at the PCC for a given feasible setpoint.
struct OperatingPoint {
    double v = 0.0;        ///< positive-sequence voltage magnitude
    double p = 0.0;        ///< active power (convention-scaled)
    double q = 0.0;        ///< reactive power (convention-scaled)
    double i = 0.0;        ///< current magnitude
    double theta = 0.0;    ///< PCC voltage angle, degrees in [-90, 90]
    double s_margin = 0.0; ///< |r*i_q + x*i_d| - vg; feasible iff <= 0
};

} // namespace dvsopt
