/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "dsi/cli.hpp"
#include "dsi/errors.hpp"
#include "dsi/io.hpp"

namespace {

// Every config key doubles as a --key flag; flags win over the config file.
const std::pair<const char*, const char*> kRunKeys[] = {
    {"method", "dsi_esmda or dsi_rml"},
    {"inputs.layout", "layout CSV path"},
    {"inputs.ensemble", "prior ensemble CSV path"},
    {"inputs.observations", "observations CSV path"},
    {"inputs.reference", "reference vector CSV path (optional)"},
    {"output.dir", "artifact directory"},
    {"emit.posterior", "write posterior.csv (true/false)"},
    {"emit.percentiles", "write percentiles.csv (true/false)"},
    {"emit.mismatch", "write mismatch.csv (true/false)"},
    {"emit.coverage", "write coverage.csv, needs inputs.reference (true/false)"},
    {"svd.energy", "singular-value energy fraction kept, in (0,1]"},
    {"seed", "run seed"},
    {"threads", "worker threads"},
    {"esmda.na", "number of assimilation iterations"},
    {"esmda.alphas", "comma-separated inflation schedule, sum(1/alpha)=1"},
    {"esmda.truncate", "comma-separated kinds clamped at zero, or none"},
    {"localization.enabled", "force localization on/off (true/false)"},
    {"localization.lx", "critical length along x' [m]"},
    {"localization.ly", "critical length along y' [m]"},
    {"localization.t", "critical length in time [days]"},
    {"localization.theta", "anisotropy rotation [rad]"},
    {"rml.samples", "posterior sample count (default: one per member)"},
    {"rml.anamorphosis", "marginal transform onto prior CDFs (true/false)"},
    {"rml.rescale", "whiten rows by noise std before the PCA (true/false)"},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-space inversion of production forecasts"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an inversion and write its artifacts");
    std::string config_path;
    run->add_option("--config", config_path, "key=value config file (flags win)");
    std::map<std::string, std::string> overrides;
    for (const auto& [key, desc] : kRunKeys) {
        const std::string name = key;
        run->add_option_function<std::string>(
            "--" + name, [&overrides, name](const std::string& value) { overrides[name] = value; },
            desc);
    }

    auto* make = app.add_subcommand("make-testcase", "Write a synthetic case as input files");
    dsi::TestcaseConfig testcase;
    make->add_option("--case", testcase.kind, "linear or decline");
    make->add_option("--out", testcase.output_dir, "output directory")->required();
    make->add_option("--seed", testcase.seed, "case seed");
    make->add_option("--members", testcase.members, "prior ensemble size");
    make->add_option("--history", testcase.linear_history, "linear: history elements");
    make->add_option("--forecast", testcase.linear_forecast, "linear: forecast elements");
    make->add_option("--wells", testcase.wells, "decline: well count");
    make->add_option("--months", testcase.months, "decline: months simulated");
    make->add_option("--history-months", testcase.history_months, "decline: observed months");
    make->add_option("--noise-frac", testcase.noise_frac, "decline: noise as fraction of truth");
    make->add_flag("--biased", testcase.biased, "decline: reference at the prior's 99th pctile");

    auto* diag = app.add_subcommand("diagnose", "Mismatch/percentiles of an existing ensemble");
    dsi::DiagnoseConfig diagnose;
    diag->add_option("--layout", diagnose.layout_path, "layout CSV path")->required();
    diag->add_option("--ensemble", diagnose.ensemble_path, "ensemble CSV path")->required();
    diag->add_option("--observations", diagnose.observations_path, "observations CSV path")
        ->required();
    diag->add_option("--reference", diagnose.reference_path, "reference vector CSV path");
    diag->add_option("--out", diagnose.output_dir, "output directory")->required();

    run->callback([&] {
        std::map<std::string, std::string> base;
        if (!config_path.empty())
            base = dsi::read_config_file(config_path);
        dsi::run_command(dsi::run_config_from_keys(base, overrides), std::cout);
    });
    make->callback([&] { dsi::make_testcase_command(testcase, std::cout); });
    diag->callback([&] { dsi::diagnose_command(diagnose, std::cout); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const dsi::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dsi::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const dsi::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
