// Command line front end: loads a scenario configuration, applies flag
// overrides, runs the propagation, and writes the output tables.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavestep/config.hpp"
#include "wavestep/driver.hpp"

namespace {

struct FlagOverride {
    const char* key;
    std::string value;
};

int run_command(const std::string& config_path, const std::vector<FlagOverride>& overrides,
                const std::string& sweep_spec, const std::string& sweep_spacing, bool with_oracle,
                int jobs, const std::string& out_dir) {
    using namespace wavestep;

    SimulationConfig cfg = load_config(config_path);
    for (const FlagOverride& ov : overrides)
        if (!ov.value.empty())
            apply_setting(cfg, ov.key, ov.value);

    RunOptions opts;
    opts.with_oracle = with_oracle;
    opts.jobs = jobs;
    opts.out_dir = out_dir;

    if (!sweep_spec.empty()) {
        const auto parts = detail::parse_list(sweep_spec, "sweep");
        if (parts.size() != 3)
            throw ConfigError("--sweep wants min,max,count");
        SweepRequest rq;
        rq.emin = parts[0];
        rq.emax = parts[1];
        rq.count = static_cast<int>(parts[2]);
        if (static_cast<double>(rq.count) != parts[2])
            throw ConfigError("--sweep count must be an integer");
        if (sweep_spacing == "linear")
            rq.spacing = SweepSpacing::linear;
        else if (sweep_spacing == "log")
            rq.spacing = SweepSpacing::log;
        else
            throw ConfigError("--spacing must be linear or log");
        opts.sweep = rq;
    }

    const ScenarioOutcome outcome = run_scenario(cfg, opts);

    for (const ScatteringResult& row : outcome.rows) {
        std::printf("E=%-12.6g P_refl=%-12.6g P_trans=%-12.6g error=%-10.3g cycles=%-3d t=%-10.6g %s\n",
                    row.E, row.P_refl, row.P_trans, row.error_bar, row.cycles, row.t_final,
                    row.converged ? "converged" : "NOT converged");
    }
    std::printf("tables written to %s\n", out_dir.c_str());
    return outcome.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counter-propagating wave scattering on piecewise constant potentials"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "propagate one scenario or an energy sweep");

    std::string config_path;
    run->add_option("config", config_path, "scenario configuration file")->required();

    // every config key can be overridden from the command line
    std::vector<FlagOverride> overrides = {
        {"steps", ""},          {"values", ""},        {"mass", ""},
        {"hbar", ""},           {"energy", ""},        {"x-left", ""},
        {"x-right", ""},        {"launch-interval", ""}, {"launch-points", ""},
        {"mode", ""},           {"incident", ""},      {"tol", ""},
        {"max-cycles", ""},     {"min-cycles", ""},    {"dt-sync", ""},
        {"snapshot-times", ""}, {"plot-points", ""},
    };
    for (FlagOverride& ov : overrides) {
        std::string flag = std::string("--") + ov.key;
        if (std::string_view(ov.key) == "energy")
            flag += ",--E";
        else if (std::string_view(ov.key) == "snapshot-times")
            flag += ",--snapshots";
        run->add_option(flag, ov.value);
    }

    std::string sweep_spec, sweep_spacing = "linear";
    bool with_oracle = false;
    int jobs = 0;
    std::string out_dir = ".";
    run->add_option("--sweep", sweep_spec, "energy sweep as min,max,count");
    run->add_option("--spacing", sweep_spacing, "sweep spacing: linear or log");
    run->add_flag("--oracle", with_oracle, "add exact reference columns to the result table");
    run->add_option("--jobs", jobs, "sweep worker threads, 0 = all cores");
    run->add_option("--out", out_dir, "output directory for the tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        return run_command(config_path, overrides, sweep_spec, sweep_spacing, with_oracle, jobs,
                           out_dir);
    } catch (const wavestep::EnergyAtStepEdge& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const wavestep::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
