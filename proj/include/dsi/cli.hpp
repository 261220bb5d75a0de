/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "dsi/esmda.hpp"
#include "dsi/rml.hpp"
#include "dsi/types.hpp"

namespace dsi {

enum class Method { dsi_esmda, dsi_rml };

Method method_from_string(const std::string& name);
std::string to_string(Method method);

/// Fully resolved settings of one inversion run. Every field maps one to one
/// onto a `key=value` config entry (and a command-line flag of the same
/// name), so a run can be reproduced from its manifest alone.
struct RunConfig {
    Method method = Method::dsi_esmda;

    std::string layout_path;       ///< inputs.layout
    std::string ensemble_path;     ///< inputs.ensemble
    std::string observations_path; ///< inputs.observations
    std::string reference_path;    ///< inputs.reference (optional)
    std::string output_dir;        ///< output.dir

    bool emit_posterior = true;    ///< emit.posterior
    bool emit_percentiles = true;  ///< emit.percentiles
    bool emit_mismatch = true;     ///< emit.mismatch
    bool emit_coverage = false;    ///< emit.coverage (needs inputs.reference)

    double energy = 0.99;          ///< svd.energy
    std::uint64_t seed = 0;        ///< seed
    int threads = 1;               ///< threads

    int esmda_na = 4;                  ///< esmda.na
    std::vector<double> esmda_alphas;  ///< esmda.alphas; empty means na copies of na
    std::set<DataKind> truncate_negative = {DataKind::water_rate}; ///< esmda.truncate

    bool localization_enabled = false; ///< on when localization.lx/ly/t are given
    double localization_lx = 2000.0;   ///< localization.lx [m]
    double localization_ly = 2000.0;   ///< localization.ly [m]
    double localization_t = 6000.0;    ///< localization.t [days]
    double localization_theta = 0.0;   ///< localization.theta [rad]

    int rml_samples = 0;         ///< rml.samples; 0 means one per prior member
    bool rml_anamorphosis = true; ///< rml.anamorphosis
    bool rml_rescale = false;     ///< rml.rescale

    void validate() const;
};

/// Builds a RunConfig from flat key=value settings; unknown keys are
/// rejected. `overrides` (command-line flags) win over `base` (config file).
RunConfig run_config_from_keys(const std::map<std::string, std::string>& base,
                               const std::map<std::string, std::string>& overrides = {});

/// The resolved key=value form of a config; writing it back yields the
/// manifest body.
std::map<std::string, std::string> run_config_to_keys(const RunConfig& config);

struct LoadedInputs {
    std::shared_ptr<const DataLayout> layout;
    std::unique_ptr<EnsembleMatrix> ensemble;
    Observations observations;
};

/// Loads and cross-validates the three input files of a run.
LoadedInputs load_inputs(const std::string& layout_path, const std::string& ensemble_path,
                         const std::string& observations_path);

/// Executes one inversion run end to end: load, invert, write artifacts and
/// the manifest into output.dir. On error every artifact written so far is
/// removed before the exception leaves. `log` receives a short summary.
void run_command(const RunConfig& config, std::ostream& log);

/// Emits mismatch/percentile (and coverage, when a reference is given)
/// tables for an existing ensemble, without running an inversion.
struct DiagnoseConfig {
    std::string layout_path;
    std::string ensemble_path;
    std::string observations_path;
    std::string reference_path; ///< optional
    std::string output_dir;
};

void diagnose_command(const DiagnoseConfig& config, std::ostream& log);

/// Writes a testbed case (layout/prior/observations plus case extras) as
/// CLI input files into output_dir.
struct TestcaseConfig {
    std::string kind = "decline"; ///< "linear" or "decline"
    std::string output_dir;
    std::uint64_t seed = 0;
    Eigen::Index members = 200;
    // linear
    Eigen::Index linear_history = 20;
    Eigen::Index linear_forecast = 40;
    // decline
    int wells = 2;
    int months = 36;
    int history_months = 12;
    double noise_frac = 0.10;
    bool biased = false;
};

void make_testcase_command(const TestcaseConfig& config, std::ostream& log);

} // namespace dsi
