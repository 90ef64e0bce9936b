#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dvsopt/scenario.hpp"

namespace dvsopt {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known)
            throw ConfigInvalid("unknown key '" + item.key() + "' in " + where);
    }
}

inline const nlohmann::json& require_key(const nlohmann::json& obj, const char* key,
                                         const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigInvalid("missing required key '" + std::string(key) + "' in " + where);
    return *it;
}

inline double as_number(const nlohmann::json& v, const char* key, const std::string& where) {
    if (!v.is_number())
        throw ConfigInvalid("key '" + std::string(key) + "' in " + where + " must be a number");
    return v.get<double>();
}

inline double number_field(const nlohmann::json& obj, const char* key,
                           const std::string& where) {
    return as_number(require_key(obj, key, where), key, where);
}

inline GridModel parse_grid(const nlohmann::json& obj, const std::string& where) {
    if (!obj.is_object())
        throw ConfigInvalid(where + " must be an object with keys vg, r, x");
    reject_unknown_keys(obj, {"vg", "r", "x"}, where);
    try {
        return GridModel(number_field(obj, "vg", where), number_field(obj, "r", where),
                         number_field(obj, "x", where));
    } catch (const PreconditionViolated& e) {
        throw ConfigInvalid(where + ": " + e.what());
    }
}

inline InverterLimits parse_limits(const nlohmann::json& obj, const std::string& where) {
    if (!obj.is_object())
        throw ConfigInvalid(where + " must be an object with keys i_max, p_max[, p_min]");
    reject_unknown_keys(obj, {"i_max", "p_max", "p_min"}, where);
    double p_min = 0.0;
    if (obj.contains("p_min")) p_min = as_number(obj["p_min"], "p_min", where);
    try {
        return InverterLimits(number_field(obj, "i_max", where),
                              number_field(obj, "p_max", where), p_min);
    } catch (const PreconditionViolated& e) {
        throw ConfigInvalid(where + ": " + e.what());
    }
}

inline Controller parse_controller(const nlohmann::json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "DROOP_GERMAN") return Controller::DROOP_GERMAN;
        if (s == "ODVS_PRIOR") return Controller::ODVS_PRIOR;
        if (s == "GODVS") return Controller::GODVS;
    }
    throw ConfigInvalid("controller must be one of \"DROOP_GERMAN\", \"ODVS_PRIOR\", \"GODVS\"");
}

inline PowerConvention parse_convention(const nlohmann::json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "pu") return PowerConvention::pu();
        if (s == "si") return PowerConvention::si();
    }
    throw ConfigInvalid("convention must be \"pu\" or \"si\"");
}

} // namespace detail

/// Parse a scenario configuration from JSON text. Keys match the
/// ScenarioConfig field names exactly; unknown keys anywhere (including in
/// nested objects) are rejected, as are missing required keys, wrong types,
/// and out-of-range values.
inline ScenarioConfig parse_scenario_config(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ConfigInvalid("configuration is not valid JSON");
    if (!j.is_object())
        throw ConfigInvalid("configuration root must be a JSON object");
    detail::reject_unknown_keys(
        j,
        {"grid_prefault", "grid_fault", "limits", "convention", "controller",
         "f_nominal", "m_cycles", "detect_threshold", "detect_delay_cycles", "t_sag",
         "vg_noise_pct", "seed"},
        "configuration");

    ScenarioConfig cfg;
    cfg.grid_prefault =
        detail::parse_grid(detail::require_key(j, "grid_prefault", "configuration"),
                           "grid_prefault");
    cfg.grid_fault = detail::parse_grid(
        detail::require_key(j, "grid_fault", "configuration"), "grid_fault");
    cfg.limits = detail::parse_limits(detail::require_key(j, "limits", "configuration"),
                                      "limits");
    cfg.controller =
        detail::parse_controller(detail::require_key(j, "controller", "configuration"));
    cfg.t_sag = detail::as_number(detail::require_key(j, "t_sag", "configuration"),
                                  "t_sag", "configuration");
    if (j.contains("convention")) cfg.convention = detail::parse_convention(j["convention"]);
    if (j.contains("f_nominal"))
        cfg.f_nominal = detail::as_number(j["f_nominal"], "f_nominal", "configuration");
    if (j.contains("m_cycles")) {
        if (!j["m_cycles"].is_number_integer())
            throw ConfigInvalid("m_cycles must be an integer");
        cfg.m_cycles = j["m_cycles"].get<int>();
    }
    if (j.contains("detect_threshold"))
        cfg.detect_threshold =
            detail::as_number(j["detect_threshold"], "detect_threshold", "configuration");
    if (j.contains("detect_delay_cycles"))
        cfg.detect_delay_cycles = detail::as_number(j["detect_delay_cycles"],
                                                    "detect_delay_cycles", "configuration");
    if (j.contains("vg_noise_pct"))
        cfg.vg_noise_pct =
            detail::as_number(j["vg_noise_pct"], "vg_noise_pct", "configuration");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<double>() < 0)
            throw ConfigInvalid("seed must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    validate_scenario_config(cfg);
    return cfg;
}

/// Load and parse a scenario configuration file.
inline ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigInvalid("cannot open configuration file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_config(ss.str());
}

} // namespace dvsopt
