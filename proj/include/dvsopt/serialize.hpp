#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "dvsopt/droop.hpp"
#include "dvsopt/godvs.hpp"
#include "dvsopt/oracle.hpp"
#include "dvsopt/robustness.hpp"
#include "dvsopt/scenario.hpp"

namespace dvsopt {

/// Format a double with 9 significant digits (the project-wide serialization
/// precision). NaN is normalized to "nan" regardless of sign.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

inline std::string name_of(Stage s) {
    switch (s) {
        case Stage::S1: return "S1";
        case Stage::S2: return "S2";
        case Stage::S3: return "S3";
    }
    throw Error("unknown stage value");
}

inline std::string name_of(Phase p) {
    switch (p) {
        case Phase::PREFAULT: return "PREFAULT";
        case Phase::DETECTED: return "DETECTED";
        case Phase::MEASURING: return "MEASURING";
        case Phase::SUPPORTING: return "SUPPORTING";
    }
    throw Error("unknown phase value");
}

inline std::string name_of(Controller c) {
    switch (c) {
        case Controller::DROOP_GERMAN: return "DROOP_GERMAN";
        case Controller::ODVS_PRIOR: return "ODVS_PRIOR";
        case Controller::GODVS: return "GODVS";
    }
    throw Error("unknown controller value");
}

inline std::string name_of(EquilibriumClass c) {
    switch (c) {
        case EquilibriumClass::UNIQUE_RE_OPTIMUM: return "UNIQUE_RE_OPTIMUM";
        case EquilibriumClass::LOCAL_MIN_RE: return "LOCAL_MIN_RE";
        case EquilibriumClass::LOCAL_MAX_RE: return "LOCAL_MAX_RE";
        case EquilibriumClass::VOLTAGE_OPTIMAL: return "VOLTAGE_OPTIMAL";
        case EquilibriumClass::SATURATED: return "SATURATED";
        case EquilibriumClass::INDETERMINATE: return "INDETERMINATE";
    }
    throw Error("unknown equilibrium classification value");
}

inline std::string name_of(GapMode m) {
    switch (m) {
        case GapMode::S1_ANALYTIC: return "S1_ANALYTIC";
        case GapMode::S3_OPEN_LOOP: return "S3_OPEN_LOOP";
        case GapMode::S3_CLOSED_LOOP: return "S3_CLOSED_LOOP";
    }
    throw Error("unknown gap mode value");
}

namespace detail {

inline std::string json_number(double v) {
    if (std::isnan(v)) return "null";
    return fmt_double(v);
}

inline std::string json_bool(bool b) { return b ? "true" : "false"; }

} // namespace detail

/// JSON report for a full stage solve: the solution, derived operating point,
/// stage thresholds, and which stage conditions hold.
inline std::string to_json(const StageSolution& sol, const InverterLimits& lim) {
    const StageThresholds& th = sol.thresholds;
    const bool c1 = lim.p_max >= th.p_b;
    const bool c2 = lim.i_max >= th.i_b;
    std::string s = "{\n";
    s += "  \"stage\": \"" + name_of(sol.stage) + "\",\n";
    s += "  \"id\": " + detail::json_number(sol.setpoint.i_d) + ",\n";
    s += "  \"iq\": " + detail::json_number(sol.setpoint.i_q) + ",\n";
    s += "  \"v\": " + detail::json_number(sol.op.v) + ",\n";
    s += "  \"p\": " + detail::json_number(sol.op.p) + ",\n";
    s += "  \"q\": " + detail::json_number(sol.op.q) + ",\n";
    s += "  \"i\": " + detail::json_number(sol.op.i) + ",\n";
    s += "  \"theta\": " + detail::json_number(sol.op.theta) + ",\n";
    s += "  \"s_margin\": " + detail::json_number(sol.op.s_margin) + ",\n";
    s += "  \"p_b\": " + detail::json_number(th.p_b) + ",\n";
    s += "  \"i_b\": " + detail::json_number(th.i_b) + ",\n";
    s += "  \"p_b_prime\": " + (th.c3_holds ? detail::json_number(th.p_b_prime)
                                            : std::string("null")) + ",\n";
    s += "  \"c1\": " + detail::json_bool(c1) + ",\n";
    s += "  \"c2\": " + detail::json_bool(c2) + ",\n";
    s += "  \"c3\": " + detail::json_bool(th.c3_holds) + "\n";
    s += "}\n";
    return s;
}

/// JSON report for a droop equilibrium.
inline std::string to_json(const EquilibriumReport& rep) {
    std::string s = "{\n";
    s += "  \"i_q_star\": " + detail::json_number(rep.i_q_star) + ",\n";
    s += "  \"v_star\": " + detail::json_number(rep.v_star) + ",\n";
    s += "  \"residual\": " + detail::json_number(rep.residual) + ",\n";
    s += "  \"iterations\": " + std::to_string(rep.iterations) + ",\n";
    s += "  \"classification\": \"" + name_of(rep.classification) + "\",\n";
    s += "  \"c4_holds\": " + detail::json_bool(rep.c4_holds) + "\n";
    s += "}\n";
    return s;
}

/// JSON report for a grid-search oracle run.
inline std::string to_json(const OracleResult& res) {
    std::string s = "{\n";
    s += "  \"best_setpoint\": {\n";
    s += "    \"id\": " + detail::json_number(res.best_setpoint.i_d) + ",\n";
    s += "    \"iq\": " + detail::json_number(res.best_setpoint.i_q) + "\n";
    s += "  },\n";
    s += "  \"best_v\": " + detail::json_number(res.best_v) + ",\n";
    s += "  \"grid_step\": " + detail::json_number(res.grid_step) + ",\n";
    s += "  \"evaluated\": " + std::to_string(res.evaluated) + ",\n";
    s += "  \"feasible\": " + std::to_string(res.feasible) + "\n";
    s += "}\n";
    return s;
}

/// JSON summary of a scenario run: the final supported voltage and stage when
/// the run ends in synchronism, null otherwise.
inline std::string to_json(const ScenarioSummary& sum) {
    std::string s = "{\n";
    s += "  \"final_v\": " +
         (sum.final_v ? detail::json_number(*sum.final_v) : std::string("null")) + ",\n";
    s += "  \"stage\": " +
         (sum.stage ? "\"" + name_of(*sum.stage) + "\"" : std::string("null")) + ",\n";
    s += "  \"sync_lost\": " + detail::json_bool(sum.sync_lost) + "\n";
    s += "}\n";
    return s;
}

inline std::string robustness_csv_header() {
    return "vg,scr,r_over_x,mode,trials,discarded,max_gap_pct,mean_gap_pct,seed\n";
}

/// One robustness CSV row for a gap report evaluated at a given grid case.
inline std::string robustness_csv_row(double vg, double scr, double r_over_x,
                                      const GapReport& rep) {
    std::string s;
    s += fmt_double(vg) + ",";
    s += fmt_double(scr) + ",";
    s += fmt_double(r_over_x) + ",";
    s += name_of(rep.mode) + ",";
    s += std::to_string(rep.trials) + ",";
    s += std::to_string(rep.discarded_infeasible) + ",";
    s += fmt_double(rep.gap_pct) + ",";
    s += fmt_double(rep.mean_gap_pct) + ",";
    s += std::to_string(rep.seed) + "\n";
    return s;
}

inline std::string timeline_csv_header() {
    return "t,phase,id,iq,v,p,q,i,s_margin,stage,sync_lost\n";
}

/// One timeline CSV row. Quantities undefined at an infeasible operating
/// point serialize as nan; an absent stage serializes as an empty field.
inline std::string timeline_csv_row(const TimelineRecord& rec) {
    std::string s;
    s += fmt_double(rec.t) + ",";
    s += name_of(rec.phase) + ",";
    s += fmt_double(rec.setpoint.i_d) + ",";
    s += fmt_double(rec.setpoint.i_q) + ",";
    s += fmt_double(rec.op.v) + ",";
    s += fmt_double(rec.op.p) + ",";
    s += fmt_double(rec.op.q) + ",";
    s += fmt_double(rec.op.i) + ",";
    s += fmt_double(rec.op.s_margin) + ",";
    s += (rec.stage ? name_of(*rec.stage) : std::string("")) + ",";
    s += detail::json_bool(rec.sync_lost) + std::string("\n");
    return s;
}

} // namespace dvsopt
