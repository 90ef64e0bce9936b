#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dvsopt/config.hpp"
#include "dvsopt/droop.hpp"
#include "dvsopt/godvs.hpp"
#include "dvsopt/oracle.hpp"
#include "dvsopt/robustness.hpp"
#include "dvsopt/scenario.hpp"
#include "dvsopt/serialize.hpp"

namespace {

dvsopt::PowerConvention convention_from(const std::string& s) {
    return s == "si" ? dvsopt::PowerConvention::si() : dvsopt::PowerConvention::pu();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw dvsopt::Error("cannot open output file: " + path);
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Globally optimal dynamic voltage support for grid-tied inverters"};
    app.require_subcommand(1);

    double vg = 0.0, r = 0.0, x = 0.0, imax = 0.0, pmax = 0.0, pmin = 0.0;
    double epsilon = 0.0, vn = 0.0, delta = 0.0;
    double alpha = 0.1, beta = 0.1, pfrac = 0.5;
    int trials = 200;
    std::uint64_t seed = 42;
    std::string convention = "pu", mode, config_path, out_path;

    const auto add_grid_options = [&](CLI::App* cmd) {
        cmd->add_option("--vg", vg, "grid voltage magnitude")->required();
        cmd->add_option("--r", r, "grid resistance")->required();
        cmd->add_option("--x", x, "grid reactance")->required();
        cmd->add_option("--imax", imax, "inverter current limit")->required();
    };
    const auto add_power_options = [&](CLI::App* cmd) {
        cmd->add_option("--pmax", pmax, "available active power")->required();
        cmd->add_option("--pmin", pmin, "active power floor (<= 0)");
        cmd->add_option("--convention", convention, "power convention")
            ->check(CLI::IsMember({"pu", "si"}));
    };

    auto* solve_cmd =
        app.add_subcommand("solve", "Optimal voltage-support setpoint for one sag");
    add_grid_options(solve_cmd);
    add_power_options(solve_cmd);
    solve_cmd->callback([&] {
        const dvsopt::GridModel g(vg, r, x);
        const dvsopt::InverterLimits lim(imax, pmax, pmin);
        const auto sol = dvsopt::solve(g, convention_from(convention), lim);
        std::cout << dvsopt::to_json(sol, lim);
    });

    auto* droop_cmd =
        app.add_subcommand("droop", "Reactive-droop equilibrium and classification");
    add_grid_options(droop_cmd);
    droop_cmd->add_option("--epsilon", epsilon, "droop gain")->required();
    droop_cmd->add_option("--vn", vn, "nominal droop voltage")->required();
    droop_cmd->callback([&] {
        const dvsopt::GridModel g(vg, r, x);
        const dvsopt::DroopRule rule(epsilon, vn, imax);
        std::cout << dvsopt::to_json(dvsopt::find_equilibrium(g, rule));
    });

    auto* oracle_cmd =
        app.add_subcommand("oracle", "Brute-force lattice search over feasible setpoints");
    add_grid_options(oracle_cmd);
    add_power_options(oracle_cmd);
    oracle_cmd->add_option("--delta", delta, "lattice step (0 < delta <= 0.05)")->required();
    oracle_cmd->callback([&] {
        const dvsopt::GridModel g(vg, r, x);
        const dvsopt::InverterLimits lim(imax, pmax, pmin);
        std::cout << dvsopt::to_json(
            dvsopt::grid_search(g, convention_from(convention), lim, delta));
    });

    auto* rob_cmd = app.add_subcommand(
        "robustness", "Optimality-gap analysis under impedance-estimation error");
    rob_cmd->add_option("--mode", mode, "analysis regime")
        ->required()
        ->check(CLI::IsMember({"s1", "s3"}));
    rob_cmd->add_option("--alpha", alpha, "relative resistance error half-width");
    rob_cmd->add_option("--beta", beta, "relative reactance error half-width");
    rob_cmd->add_option("--trials", trials, "Monte-Carlo trials per case");
    rob_cmd->add_option("--pfrac", pfrac, "available power as a fraction of the stage boundary");
    rob_cmd->add_option("--seed", seed, "random seed");
    rob_cmd->add_option("--out", out_path, "write CSV here instead of stdout");
    rob_cmd->callback([&] {
        const auto band = dvsopt::UncertaintyBand::symmetric(alpha, beta);
        std::string csv = dvsopt::robustness_csv_header();
        if (mode == "s1") {
            for (auto row : dvsopt::s1_regime_sweep(band)) {
                row.report.seed = seed;
                csv += dvsopt::robustness_csv_row(row.vg, row.scr, row.r_over_x, row.report);
            }
        } else {
            const auto cases = dvsopt::mc_default_cases();
            for (const auto& rep :
                 dvsopt::monte_carlo_s3(cases, band, trials, pfrac, seed)) {
                csv += dvsopt::robustness_csv_row(rep.c.vg, rep.c.scr, rep.c.r_over_x,
                                                  rep.open);
                csv += dvsopt::robustness_csv_row(rep.c.vg, rep.c.scr, rep.c.r_over_x,
                                                  rep.closed);
            }
        }
        write_text(out_path, csv);
    });

    auto* scen_cmd =
        app.add_subcommand("scenario", "Quasi-static sag timeline for one controller");
    scen_cmd->add_option("--config", config_path, "scenario configuration (JSON)")
        ->required();
    scen_cmd->add_option("--out", out_path, "write the timeline CSV here instead of stdout");
    scen_cmd->callback([&] {
        const auto cfg = dvsopt::load_scenario_config(config_path);
        const auto res = dvsopt::run_scenario(cfg);
        std::string csv = dvsopt::timeline_csv_header();
        for (const auto& rec : res.timeline) csv += dvsopt::timeline_csv_row(rec);
        write_text(out_path, csv);
        std::cout << dvsopt::to_json(res.summary);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const dvsopt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
