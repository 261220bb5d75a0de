/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "dsi/diagnostics.hpp"
#include "dsi/io.hpp"
#include "dsi/testbed.hpp"

namespace dsi {

namespace fs = std::filesystem;

Method method_from_string(const std::string& name) {
    if (name == "dsi_esmda")
        return Method::dsi_esmda;
    if (name == "dsi_rml")
        return Method::dsi_rml;
    throw ConfigError("unknown method '" + name + "' (use dsi_esmda or dsi_rml)");
}

std::string to_string(Method method) {
    return method == Method::dsi_esmda ? "dsi_esmda" : "dsi_rml";
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw ConfigError("key '" + key + "' has invalid value '" + value + "'");
}

double parse_double_value(const std::string& key, const std::string& value) {
    double v = 0.0;
    const char* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        bad_value(key, value);
    return v;
}

long long parse_int_value(const std::string& key, const std::string& value) {
    long long v = 0;
    const char* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        bad_value(key, value);
    return v;
}

std::uint64_t parse_uint64_value(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const char* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        bad_value(key, value);
    return v;
}

bool parse_bool_value(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    bad_value(key, value);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = value.find(',', start);
        if (comma == std::string::npos) {
            items.push_back(value.substr(start));
            return items;
        }
        items.push_back(value.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0)
            out += ',';
        out += items[i];
    }
    return out;
}

// Removes every tracked artifact unless the run commits, so a failed run
// leaves no partial outputs behind.
class ArtifactSet {
public:
    ~ArtifactSet() {
        if (committed_)
            return;
        for (const std::string& p : paths_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

    const std::string& track(const std::string& path) {
        paths_.push_back(path);
        return paths_.back();
    }

    void commit() { committed_ = true; }

private:
    std::vector<std::string> paths_;
    bool committed_ = false;
};

std::ofstream open_artifact(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path);
    return out;
}

void finish_artifact(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out)
        throw DataError("write failed for " + path);
}

void write_percentiles_csv(const std::string& path, const DataLayout& layout,
                           const PercentileBand& band) {
    auto out = open_artifact(path);
    out << "id,p10,p50,p90\n";
    for (Eigen::Index i = 0; i < layout.size(); ++i)
        out << layout[i].id << ',' << format_double(band.p10[i]) << ','
            << format_double(band.p50[i]) << ',' << format_double(band.p90[i]) << '\n';
    finish_artifact(out, path);
}

std::string prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create output directory " + dir + ": " + ec.message());
    return dir;
}

std::string join_path(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

} // namespace

void RunConfig::validate() const {
    if (layout_path.empty() || ensemble_path.empty() || observations_path.empty())
        throw ConfigError("inputs.layout, inputs.ensemble and inputs.observations are required");
    if (output_dir.empty())
        throw ConfigError("output.dir is required");
    if (!(energy > 0.0) || energy > 1.0)
        throw ConfigError("svd.energy must be in (0, 1]");
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
    if (esmda_na < 1)
        throw ConfigError("esmda.na must be >= 1");
    if (!esmda_alphas.empty())
        MdaSchedule schedule(esmda_alphas); // validates sum(1/alpha) = 1
    if (rml_samples < 0)
        throw ConfigError("rml.samples must be >= 1");
    if (emit_coverage && reference_path.empty())
        throw ConfigError("emit.coverage needs inputs.reference");
    if (localization_enabled) {
        LocalizationSpec spec{localization_lx, localization_ly, localization_t,
                              localization_theta, true};
        spec.validate();
    }
}

RunConfig run_config_from_keys(const std::map<std::string, std::string>& base,
                               const std::map<std::string, std::string>& overrides) {
    std::map<std::string, std::string> kv = base;
    for (const auto& [key, value] : overrides)
        kv[key] = value;

    RunConfig config;
    bool any_length = false;
    bool explicit_enabled = false;

    for (const auto& [key, value] : kv) {
        if (key == "method") {
            config.method = method_from_string(value);
        } else if (key == "inputs.layout") {
            config.layout_path = value;
        } else if (key == "inputs.ensemble") {
            config.ensemble_path = value;
        } else if (key == "inputs.observations") {
            config.observations_path = value;
        } else if (key == "inputs.reference") {
            config.reference_path = value;
        } else if (key == "output.dir") {
            config.output_dir = value;
        } else if (key == "emit.posterior") {
            config.emit_posterior = parse_bool_value(key, value);
        } else if (key == "emit.percentiles") {
            config.emit_percentiles = parse_bool_value(key, value);
        } else if (key == "emit.mismatch") {
            config.emit_mismatch = parse_bool_value(key, value);
        } else if (key == "emit.coverage") {
            config.emit_coverage = parse_bool_value(key, value);
        } else if (key == "svd.energy") {
            config.energy = parse_double_value(key, value);
        } else if (key == "seed") {
            config.seed = parse_uint64_value(key, value);
        } else if (key == "threads") {
            config.threads = static_cast<int>(parse_int_value(key, value));
        } else if (key == "esmda.na") {
            config.esmda_na = static_cast<int>(parse_int_value(key, value));
        } else if (key == "esmda.alphas") {
            config.esmda_alphas.clear();
            for (const std::string& item : split_list(value))
                config.esmda_alphas.push_back(parse_double_value(key, item));
        } else if (key == "esmda.truncate") {
            config.truncate_negative.clear();
            if (value != "none")
                for (const std::string& item : split_list(value))
                    try {
                        config.truncate_negative.insert(data_kind_from_string(item));
                    } catch (const DataError& err) {
                        throw ConfigError("key 'esmda.truncate': " + std::string(err.what()));
                    }
        } else if (key == "localization.enabled") {
            config.localization_enabled = parse_bool_value(key, value);
            explicit_enabled = true;
        } else if (key == "localization.lx") {
            config.localization_lx = parse_double_value(key, value);
            any_length = true;
        } else if (key == "localization.ly") {
            config.localization_ly = parse_double_value(key, value);
            any_length = true;
        } else if (key == "localization.t") {
            config.localization_t = parse_double_value(key, value);
            any_length = true;
        } else if (key == "localization.theta") {
            config.localization_theta = parse_double_value(key, value);
        } else if (key == "rml.samples") {
            config.rml_samples = static_cast<int>(parse_int_value(key, value));
            if (config.rml_samples < 1)
                throw ConfigError("rml.samples must be >= 1");
        } else if (key == "rml.anamorphosis") {
            config.rml_anamorphosis = parse_bool_value(key, value);
        } else if (key == "rml.rescale") {
            config.rml_rescale = parse_bool_value(key, value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    // Giving any critical length turns localization on, unless an explicit
    // localization.enabled says otherwise (as a manifest does).
    if (!explicit_enabled)
        config.localization_enabled = any_length;

    config.validate();
    return config;
}

std::map<std::string, std::string> run_config_to_keys(const RunConfig& config) {
    std::map<std::string, std::string> kv;
    kv["method"] = to_string(config.method);
    kv["inputs.layout"] = config.layout_path;
    kv["inputs.ensemble"] = config.ensemble_path;
    kv["inputs.observations"] = config.observations_path;
    if (!config.reference_path.empty())
        kv["inputs.reference"] = config.reference_path;
    kv["output.dir"] = config.output_dir;
    kv["emit.posterior"] = config.emit_posterior ? "true" : "false";
    kv["emit.percentiles"] = config.emit_percentiles ? "true" : "false";
    kv["emit.mismatch"] = config.emit_mismatch ? "true" : "false";
    kv["emit.coverage"] = config.emit_coverage ? "true" : "false";
    kv["svd.energy"] = format_double(config.energy);
    kv["seed"] = std::to_string(config.seed);
    kv["threads"] = std::to_string(config.threads);
    kv["esmda.na"] = std::to_string(config.esmda_na);
    if (!config.esmda_alphas.empty()) {
        std::vector<std::string> items;
        for (double a : config.esmda_alphas)
            items.push_back(format_double(a));
        kv["esmda.alphas"] = join_list(items);
    }
    {
        std::vector<std::string> items;
        for (DataKind kind : config.truncate_negative)
            items.emplace_back(to_string(kind));
        kv["esmda.truncate"] = items.empty() ? "none" : join_list(items);
    }
    kv["localization.enabled"] = config.localization_enabled ? "true" : "false";
    if (config.localization_enabled) {
        kv["localization.lx"] = format_double(config.localization_lx);
        kv["localization.ly"] = format_double(config.localization_ly);
        kv["localization.t"] = format_double(config.localization_t);
        kv["localization.theta"] = format_double(config.localization_theta);
    }
    if (config.rml_samples > 0)
        kv["rml.samples"] = std::to_string(config.rml_samples);
    kv["rml.anamorphosis"] = config.rml_anamorphosis ? "true" : "false";
    kv["rml.rescale"] = config.rml_rescale ? "true" : "false";
    return kv;
}

LoadedInputs load_inputs(const std::string& layout_path, const std::string& ensemble_path,
                         const std::string& observations_path) {
    LoadedInputs inputs;
    inputs.layout = read_layout_csv(layout_path);
    inputs.ensemble =
        std::make_unique<EnsembleMatrix>(read_ensemble_csv(ensemble_path, inputs.layout));
    inputs.observations = read_observations_csv(observations_path, *inputs.layout);
    return inputs;
}

void run_command(const RunConfig& config, std::ostream& log) {
    const auto wall_start = std::chrono::steady_clock::now();
    config.validate();

    LoadedInputs inputs =
        load_inputs(config.layout_path, config.ensemble_path, config.observations_path);
    const EnsembleMatrix& prior = *inputs.ensemble;

    Eigen::VectorXd reference;
    if (!config.reference_path.empty())
        reference = read_vector_csv(config.reference_path, *inputs.layout);

    // Materialize values the manifest must pin down even when defaulted.
    RunConfig resolved = config;
    if (resolved.method == Method::dsi_esmda && resolved.esmda_alphas.empty())
        resolved.esmda_alphas = MdaSchedule::uniform(resolved.esmda_na).alphas();
    resolved.esmda_na = static_cast<int>(resolved.esmda_alphas.empty()
                                             ? resolved.esmda_na
                                             : resolved.esmda_alphas.size());
    if (resolved.method == Method::dsi_rml && resolved.rml_samples == 0)
        resolved.rml_samples = static_cast<int>(prior.members());

    log << "method: " << to_string(resolved.method) << "\n";
    log << "ensemble: " << prior.size() << " elements x " << prior.members() << " members ("
        << prior.layout().history_size() << " observed)\n";

    const auto inversion_start = std::chrono::steady_clock::now();
    std::unique_ptr<EnsembleMatrix> posterior;
    RmlResult* rml_result_ptr = nullptr;
    std::unique_ptr<RmlResult> rml_result;
    if (resolved.method == Method::dsi_esmda) {
        EsmdaConfig method_config{MdaSchedule(resolved.esmda_alphas),
                                  resolved.energy,
                                  LocalizationSpec{resolved.localization_lx,
                                                   resolved.localization_ly,
                                                   resolved.localization_t,
                                                   resolved.localization_theta,
                                                   resolved.localization_enabled},
                                  resolved.seed,
                                  resolved.truncate_negative,
                                  resolved.threads};
        posterior = std::make_unique<EnsembleMatrix>(
            run_dsi_esmda(prior, inputs.observations, method_config));
    } else {
        RmlConfig method_config;
        method_config.energy = resolved.energy;
        method_config.n_samples = resolved.rml_samples;
        method_config.anamorphosis = resolved.rml_anamorphosis;
        method_config.rescale_by_ce = resolved.rml_rescale;
        method_config.seed = resolved.seed;
        method_config.threads = resolved.threads;
        rml_result = std::make_unique<RmlResult>(
            run_dsi_rml(prior, inputs.observations, method_config));
        rml_result_ptr = rml_result.get();
        posterior = std::make_unique<EnsembleMatrix>(rml_result->posterior);
    }
    const std::chrono::duration<double> inversion_seconds =
        std::chrono::steady_clock::now() - inversion_start;

    const MismatchReport prior_mismatch = normalized_mismatch(prior, inputs.observations);
    const MismatchReport posterior_mismatch = normalized_mismatch(*posterior, inputs.observations);
    log << "prior mismatch: mean " << format_double(prior_mismatch.mean) << " std "
        << format_double(prior_mismatch.std) << "\n";
    log << "posterior mismatch: mean " << format_double(posterior_mismatch.mean) << " std "
        << format_double(posterior_mismatch.std) << "\n";
    if (rml_result_ptr)
        log << "rml converged: " << rml_result_ptr->n_converged() << "/"
            << rml_result_ptr->status.size() << "\n";

    prepare_output_dir(resolved.output_dir);
    ArtifactSet artifacts;

    if (resolved.emit_posterior)
        write_ensemble_csv(artifacts.track(join_path(resolved.output_dir, "posterior.csv")),
                           *posterior);
    if (resolved.emit_percentiles)
        write_percentiles_csv(artifacts.track(join_path(resolved.output_dir, "percentiles.csv")),
                              *inputs.layout, percentile_band(*posterior));
    if (resolved.emit_mismatch) {
        const std::string path = artifacts.track(join_path(resolved.output_dir, "mismatch.csv"));
        auto out = open_artifact(path);
        out << "set,mean,std\n";
        out << "prior," << format_double(prior_mismatch.mean) << ','
            << format_double(prior_mismatch.std) << '\n';
        out << "posterior," << format_double(posterior_mismatch.mean) << ','
            << format_double(posterior_mismatch.std) << '\n';
        finish_artifact(out, path);
    }
    if (resolved.emit_coverage) {
        const std::string path = artifacts.track(join_path(resolved.output_dir, "coverage.csv"));
        auto out = open_artifact(path);
        out << "set,band_lo,band_hi,coverage\n";
        out << "prior,0.1,0.9," << format_double(coverage(prior, reference, 0.1, 0.9)) << '\n';
        out << "posterior,0.1,0.9," << format_double(coverage(*posterior, reference, 0.1, 0.9))
            << '\n';
        finish_artifact(out, path);
    }
    if (rml_result_ptr) {
        const std::string path =
            artifacts.track(join_path(resolved.output_dir, "convergence.csv"));
        auto out = open_artifact(path);
        out << "sample,converged,iterations,grad_norm,objective\n";
        for (std::size_t j = 0; j < rml_result_ptr->status.size(); ++j) {
            const RmlSampleStatus& s = rml_result_ptr->status[j];
            out << (j + 1) << ',' << (s.converged ? 1 : 0) << ',' << s.iterations << ','
                << format_double(s.grad_norm) << ',' << format_double(s.objective) << '\n';
        }
        finish_artifact(out, path);
    }

    {
        const std::chrono::duration<double> wall_seconds =
            std::chrono::steady_clock::now() - wall_start;
        const std::string path = artifacts.track(join_path(resolved.output_dir, "manifest.txt"));
        auto out = open_artifact(path);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f", inversion_seconds.count());
        out << "# inversion_seconds=" << buf << '\n';
        std::snprintf(buf, sizeof(buf), "%.3f", wall_seconds.count());
        out << "# wall_clock_seconds=" << buf << '\n';
        for (const auto& [key, value] : run_config_to_keys(resolved))
            out << key << '=' << value << '\n';
        finish_artifact(out, path);
    }

    artifacts.commit();
    log << "inversion took " << format_double(inversion_seconds.count()) << " s\n";
    log << "artifacts in " << resolved.output_dir << "\n";
}

void diagnose_command(const DiagnoseConfig& config, std::ostream& log) {
    if (config.layout_path.empty() || config.ensemble_path.empty() ||
        config.observations_path.empty())
        throw ConfigError("diagnose needs layout, ensemble and observations paths");
    if (config.output_dir.empty())
        throw ConfigError("output directory is required");

    LoadedInputs inputs =
        load_inputs(config.layout_path, config.ensemble_path, config.observations_path);
    const EnsembleMatrix& ens = *inputs.ensemble;

    const MismatchReport mismatch = normalized_mismatch(ens, inputs.observations);
    log << "mismatch: mean " << format_double(mismatch.mean) << " std "
        << format_double(mismatch.std) << "\n";

    prepare_output_dir(config.output_dir);
    ArtifactSet artifacts;
    {
        const std::string path = artifacts.track(join_path(config.output_dir, "mismatch.csv"));
        auto out = open_artifact(path);
        out << "set,mean,std\n";
        out << "ensemble," << format_double(mismatch.mean) << ',' << format_double(mismatch.std)
            << '\n';
        finish_artifact(out, path);
    }
    write_percentiles_csv(artifacts.track(join_path(config.output_dir, "percentiles.csv")),
                          *inputs.layout, percentile_band(ens));
    if (!config.reference_path.empty()) {
        const Eigen::VectorXd reference = read_vector_csv(config.reference_path, *inputs.layout);
        const std::string path = artifacts.track(join_path(config.output_dir, "coverage.csv"));
        auto out = open_artifact(path);
        out << "set,band_lo,band_hi,coverage\n";
        out << "ensemble,0.1,0.9," << format_double(coverage(ens, reference, 0.1, 0.9)) << '\n';
        finish_artifact(out, path);
    }
    artifacts.commit();
    log << "artifacts in " << config.output_dir << "\n";
}

void make_testcase_command(const TestcaseConfig& config, std::ostream& log) {
    if (config.output_dir.empty())
        throw ConfigError("output directory is required");
    prepare_output_dir(config.output_dir);
    ArtifactSet artifacts;

    if (config.kind == "linear") {
        const LinearGaussianCase built = build_linear_case(default_linear_config(
            config.linear_history, config.linear_forecast, config.members, config.seed));
        write_layout_csv(artifacts.track(join_path(config.output_dir, "layout.csv")),
                         built.prior.layout());
        write_ensemble_csv(artifacts.track(join_path(config.output_dir, "prior.csv")),
                           built.prior);
        write_observations_csv(artifacts.track(join_path(config.output_dir, "observations.csv")),
                               built.prior.layout(), built.obs);
        write_vector_csv(artifacts.track(join_path(config.output_dir, "posterior_mean.csv")),
                         built.prior.layout(), built.posterior_mean, "posterior_mean");
        write_vector_csv(artifacts.track(join_path(config.output_dir, "posterior_var.csv")),
                         built.prior.layout(), built.posterior_cov.diagonal(), "posterior_var");
        log << "linear case: " << built.prior.size() << " elements x " << built.prior.members()
            << " members\n";
    } else if (config.kind == "decline") {
        DeclineCaseConfig decline;
        decline.n_wells = config.wells;
        decline.n_members = config.members;
        decline.n_months = config.months;
        decline.history_months = config.history_months;
        decline.noise_frac = config.noise_frac;
        decline.biased_reference = config.biased;
        decline.seed = config.seed;
        const DeclineCurveCase built = build_decline_case(decline);
        write_layout_csv(artifacts.track(join_path(config.output_dir, "layout.csv")),
                         built.prior.layout());
        write_ensemble_csv(artifacts.track(join_path(config.output_dir, "prior.csv")),
                           built.prior);
        write_observations_csv(artifacts.track(join_path(config.output_dir, "observations.csv")),
                               built.prior.layout(), built.obs);
        write_vector_csv(artifacts.track(join_path(config.output_dir, "reference.csv")),
                         built.prior.layout(), built.reference, "reference");
        log << "decline case: " << built.prior.size() << " elements x " << built.prior.members()
            << " members\n";
    } else {
        throw ConfigError("unknown case '" + config.kind + "' (use linear or decline)");
    }

    artifacts.commit();
    log << "artifacts in " << config.output_dir << "\n";
}

} // namespace dsi
