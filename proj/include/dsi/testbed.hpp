/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "dsi/types.hpp"

namespace dsi {

/// Linear-Gaussian experiment: history d_h ~ N(mean, cov), forecast
/// d_f = forecast_map * d_h, observations d_h + noise with diagonal Ce.
/// The exact posterior of the full vector is available in closed form, so
/// inversion output can be compared against the truth moment by moment.
struct LinearCaseConfig {
    Eigen::VectorXd prior_mean_h;
    Eigen::MatrixXd prior_cov_h;  ///< symmetric positive definite
    Eigen::MatrixXd forecast_map; ///< n_forecast x n_history
    Eigen::VectorXd ce_diag;      ///< n_history, strictly positive
    Eigen::VectorXd obs_values;   ///< n_history
    Eigen::Index n_members = 200;
    std::uint64_t seed = 0;
};

/// Smooth default instance: unit-variance AR(1)-correlated history prior
/// around 1, forecast rows tiling 2x the history, unit noise, observations
/// at 3. Chosen so posterior moments sit well away from zero.
LinearCaseConfig default_linear_config(Eigen::Index n_history, Eigen::Index n_forecast,
                                       Eigen::Index n_members, std::uint64_t seed);

struct LinearGaussianCase {
    LinearCaseConfig config;
    EnsembleMatrix prior;
    Observations obs;
    Eigen::VectorXd posterior_mean; ///< full vector, exact
    Eigen::MatrixXd posterior_cov;  ///< full vector, exact
};

LinearGaussianCase build_linear_case(const LinearCaseConfig& config);

/// Nonlinear experiment standing in for a reservoir simulator: per well an
/// exponential oil-rate decline q0 exp(-a t) and a logistic water rate
/// wmax / (1 + exp(-b (t - t_bt))) on a uniform monthly grid, parameters
/// drawn per member from a lognormal prior. History is the leading months,
/// corrupted with noise proportional to the reference truth.
struct DeclineCaseConfig {
    int n_wells = 2;
    Eigen::Index n_members = 200;
    int n_months = 36;
    int history_months = 12; ///< strictly inside the grid
    double noise_frac = 0.10;
    /// Reference parameters at the prior's 99th percentile instead of a
    /// prior draw; the prior band then covers the truth poorly.
    bool biased_reference = false;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DeclineCurveCase {
    EnsembleMatrix prior;
    Observations obs;
    Eigen::VectorXd reference; ///< noise-free truth, full vector
};

DeclineCurveCase build_decline_case(const DeclineCaseConfig& config);

} // namespace dsi
