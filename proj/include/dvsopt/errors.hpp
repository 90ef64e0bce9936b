#pragma once

#include <stdexcept>
#include <string>

namespace dvsopt {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// The setpoint has no real PCC-voltage solution (|r*i_q + x*i_d| > vg):
/// the inverter would lose synchronism at this operating point.
class InfeasibleSetpoint : public Error {
public:
    using Error::Error;
};

/// The voltage surface is not differentiable here (stability margin ~ 0).
class NondifferentiablePoint : public Error {
public:
    using Error::Error;
};

/// A documented precondition of the called operation does not hold.
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

/// A modelling assumption required by the analysis does not hold.
class AssumptionViolated : public Error {
public:
    using Error::Error;
};

/// An iterative scheme exhausted its iteration budget.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A scalar root-finder was asked to search an interval with no sign change.
class RootNotBracketed : public Error {
public:
    using Error::Error;
};

/// A configuration file or parameter set is malformed.
class ConfigInvalid : public Error {
public:
    using Error::Error;
};

} // namespace dvsopt
