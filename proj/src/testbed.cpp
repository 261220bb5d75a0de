/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/testbed.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dsi/errors.hpp"
#include "dsi/random.hpp"

namespace dsi {

namespace {

std::string padded(int value, int width) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%0*d", width, value);
    return buf;
}

} // namespace

LinearCaseConfig default_linear_config(Eigen::Index n_history, Eigen::Index n_forecast,
                                       Eigen::Index n_members, std::uint64_t seed) {
    LinearCaseConfig config;
    config.prior_mean_h = Eigen::VectorXd::Constant(n_history, 1.0);
    config.prior_cov_h.resize(n_history, n_history);
    for (Eigen::Index i = 0; i < n_history; ++i)
        for (Eigen::Index j = 0; j < n_history; ++j)
            config.prior_cov_h(i, j) = std::pow(0.3, std::abs(static_cast<double>(i - j)));
    config.forecast_map = Eigen::MatrixXd::Zero(n_forecast, n_history);
    for (Eigen::Index i = 0; i < n_forecast; ++i)
        config.forecast_map(i, i % n_history) = 2.0;
    config.ce_diag = Eigen::VectorXd::Ones(n_history);
    config.obs_values = Eigen::VectorXd::Constant(n_history, 3.0);
    config.n_members = n_members;
    config.seed = seed;
    return config;
}

LinearGaussianCase build_linear_case(const LinearCaseConfig& config) {
    const Eigen::Index n_h = config.prior_mean_h.size();
    const Eigen::Index n_f = config.forecast_map.rows();
    if (config.prior_cov_h.rows() != n_h || config.prior_cov_h.cols() != n_h)
        throw DataError("prior covariance shape does not match the mean length");
    if (config.forecast_map.cols() != n_h)
        throw DataError("forecast map has " + std::to_string(config.forecast_map.cols()) +
                        " columns, history has " + std::to_string(n_h) + " elements");
    if (config.ce_diag.size() != n_h || config.obs_values.size() != n_h)
        throw DataError("observation vectors do not match the history length");
    if (!(config.ce_diag.minCoeff() > 0.0))
        throw DataError("observation error variances must be strictly positive");
    if (config.n_members < 2)
        throw DataError("degenerate ensemble: need at least two members");

    const Eigen::LLT<Eigen::MatrixXd> chol(config.prior_cov_h);
    if (chol.info() != Eigen::Success)
        throw DataError("prior covariance is not positive definite");
    const Eigen::MatrixXd chol_l = chol.matrixL();

    std::vector<DataElement> elements;
    elements.reserve(static_cast<std::size_t>(n_h + n_f));
    for (Eigen::Index i = 0; i < n_h; ++i) {
        DataElement e;
        e.id = "h" + padded(static_cast<int>(i) + 1, 4);
        e.well_id = "H";
        e.time = static_cast<double>(i);
        e.kind = DataKind::other;
        e.is_history = true;
        e.noise_std = std::sqrt(config.ce_diag[i]);
        elements.push_back(std::move(e));
    }
    for (Eigen::Index i = 0; i < n_f; ++i) {
        DataElement e;
        e.id = "f" + padded(static_cast<int>(i) + 1, 4);
        e.well_id = "F";
        e.time = static_cast<double>(n_h + i);
        e.kind = DataKind::other;
        e.is_history = false;
        e.noise_std = 0.0;
        elements.push_back(std::move(e));
    }
    auto layout = std::make_shared<const DataLayout>(std::move(elements));

    Eigen::MatrixXd data(n_h + n_f, config.n_members);
    for (Eigen::Index j = 0; j < config.n_members; ++j) {
        auto engine = make_engine(config.seed, RngUse::testbed_prior,
                                  static_cast<std::uint64_t>(j));
        const Eigen::VectorXd draw =
            config.prior_mean_h + chol_l * standard_normal_vector(n_h, engine);
        data.col(j).head(n_h) = draw;
        data.col(j).tail(n_f) = config.forecast_map * draw;
    }

    // Exact joint-Gaussian conditioning on d_obs = d_h + noise:
    //   mean + Cov[d, d_h] (C_h + Ce)^-1 (d_obs - mean_h).
    const Eigen::MatrixXd& c_h = config.prior_cov_h;
    Eigen::MatrixXd cross(n_h + n_f, n_h);
    cross.topRows(n_h) = c_h;
    cross.bottomRows(n_f) = config.forecast_map * c_h;

    Eigen::MatrixXd innovation_cov = c_h;
    innovation_cov.diagonal() += config.ce_diag;
    const Eigen::LLT<Eigen::MatrixXd> innovation_chol(innovation_cov);
    if (innovation_chol.info() != Eigen::Success)
        throw NumericalError("innovation covariance factorization failed");
    const Eigen::MatrixXd gain = innovation_chol.solve(cross.transpose()).transpose();

    Eigen::VectorXd prior_mean_full(n_h + n_f);
    prior_mean_full.head(n_h) = config.prior_mean_h;
    prior_mean_full.tail(n_f) = config.forecast_map * config.prior_mean_h;

    Eigen::MatrixXd prior_cov_full(n_h + n_f, n_h + n_f);
    prior_cov_full.topLeftCorner(n_h, n_h) = c_h;
    prior_cov_full.topRightCorner(n_h, n_f) = cross.bottomRows(n_f).transpose();
    prior_cov_full.bottomLeftCorner(n_f, n_h) = cross.bottomRows(n_f);
    prior_cov_full.bottomRightCorner(n_f, n_f) =
        config.forecast_map * c_h * config.forecast_map.transpose();

    LinearGaussianCase out{config,
                           EnsembleMatrix(std::move(data), layout),
                           Observations{config.obs_values,
                                        config.ce_diag.cwiseSqrt()},
                           prior_mean_full + gain * (config.obs_values - config.prior_mean_h),
                           prior_cov_full - gain * cross.transpose()};
    out.posterior_cov = 0.5 * (out.posterior_cov + out.posterior_cov.transpose()).eval();
    return out;
}

namespace {

struct WellParams {
    double q0;   ///< initial oil rate [m3/day]
    double a;    ///< exponential decline [1/day]
    double wmax; ///< water-rate plateau [m3/day]
    double b;    ///< breakthrough steepness [1/day]
    double t_bt; ///< breakthrough time [days]
};

struct LogNormalPrior {
    double log_mean;
    double log_std;
};

const std::array<LogNormalPrior, 5>& well_priors() {
    static const std::array<LogNormalPrior, 5> priors = {{
        {std::log(100.0), 0.30},
        {std::log(0.002), 0.30},
        {std::log(80.0), 0.25},
        {std::log(0.01), 0.30},
        {std::log(400.0), 0.30},
    }};
    return priors;
}

WellParams params_from_normals(const double* z) {
    const auto& priors = well_priors();
    double p[5];
    for (int i = 0; i < 5; ++i)
        p[i] = std::exp(priors[static_cast<std::size_t>(i)].log_mean +
                        priors[static_cast<std::size_t>(i)].log_std * z[i]);
    return {p[0], p[1], p[2], p[3], p[4]};
}

double oil_rate(const WellParams& w, double t) { return w.q0 * std::exp(-w.a * t); }

double water_rate(const WellParams& w, double t) {
    return w.wmax / (1.0 + std::exp(-w.b * (t - w.t_bt)));
}

std::vector<WellParams> draw_well_set(int n_wells, std::mt19937_64& engine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<WellParams> wells;
    wells.reserve(static_cast<std::size_t>(n_wells));
    for (int w = 0; w < n_wells; ++w) {
        double z[5];
        for (double& v : z)
            v = normal(engine);
        wells.push_back(params_from_normals(z));
    }
    return wells;
}

Eigen::VectorXd simulate(const std::vector<WellParams>& wells, int n_months) {
    const auto n_wells = static_cast<Eigen::Index>(wells.size());
    Eigen::VectorXd d(n_wells * n_months * 2);
    Eigen::Index row = 0;
    for (const WellParams& w : wells) {
        for (int m = 0; m < n_months; ++m) {
            const double t = 30.0 * (m + 1);
            d[row++] = oil_rate(w, t);
            d[row++] = water_rate(w, t);
        }
    }
    return d;
}

} // namespace

void DeclineCaseConfig::validate() const {
    if (n_wells < 1)
        throw ConfigError("needs at least one well");
    if (n_members < 2)
        throw ConfigError("degenerate ensemble: need at least two members");
    if (n_months < 2)
        throw ConfigError("needs at least two months");
    if (history_months < 1 || history_months >= n_months)
        throw ConfigError("history cut must lie strictly inside the time grid");
    if (!(noise_frac >= 0.0) || !std::isfinite(noise_frac))
        throw ConfigError("noise fraction must be finite and non-negative");
}

DeclineCurveCase build_decline_case(const DeclineCaseConfig& config) {
    config.validate();

    std::vector<WellParams> reference_wells;
    if (config.biased_reference) {
        // Every parameter at the prior's 99th percentile.
        constexpr double z99 = 2.3263478740408408;
        double z[5] = {z99, z99, z99, z99, z99};
        reference_wells.assign(static_cast<std::size_t>(config.n_wells),
                               params_from_normals(z));
    } else {
        auto engine = make_engine(config.seed, RngUse::testbed_reference);
        reference_wells = draw_well_set(config.n_wells, engine);
    }
    const Eigen::VectorXd reference = simulate(reference_wells, config.n_months);

    // Noise std is proportional to the truth, floored so pre-breakthrough
    // zeros cannot produce a zero observation variance. Forecast rows carry
    // the same indicative scale, which keeps row whitening usable.
    std::vector<DataElement> elements;
    elements.reserve(static_cast<std::size_t>(reference.size()));
    const double sigma_floor = 1e-6 * reference.cwiseAbs().maxCoeff();

    Eigen::Index row = 0;
    for (int w = 0; w < config.n_wells; ++w) {
        const std::string well = "P" + std::to_string(w + 1);
        const double x = 1500.0 * (w % 3);
        const double y = 1500.0 * (w / 3);
        for (int m = 0; m < config.n_months; ++m) {
            for (int k = 0; k < 2; ++k, ++row) {
                DataElement e;
                e.well_id = well;
                e.x = x;
                e.y = y;
                e.time = 30.0 * (m + 1);
                e.kind = k == 0 ? DataKind::oil_rate : DataKind::water_rate;
                e.id = well + (k == 0 ? "_oil_m" : "_wat_m") + padded(m + 1, 3);
                e.is_history = m < config.history_months;
                e.noise_std =
                    std::max(config.noise_frac * std::abs(reference[row]), sigma_floor);
                elements.push_back(std::move(e));
            }
        }
    }
    auto layout = std::make_shared<const DataLayout>(std::move(elements));

    Eigen::MatrixXd data(layout->size(), config.n_members);
    for (Eigen::Index j = 0; j < config.n_members; ++j) {
        auto engine = make_engine(config.seed, RngUse::testbed_prior,
                                  static_cast<std::uint64_t>(j));
        data.col(j) = simulate(draw_well_set(config.n_wells, engine), config.n_months);
    }

    Observations obs;
    obs.error_std = layout->history_noise_std();
    auto noise_engine = make_engine(config.seed, RngUse::testbed_noise);
    const Eigen::VectorXd noise =
        standard_normal_vector(layout->history_size(), noise_engine);
    obs.values = reference(layout->history_indices());
    obs.values += obs.error_std.cwiseProduct(noise);

    return {EnsembleMatrix(std::move(data), layout), std::move(obs), reference};
}

} // namespace dsi
