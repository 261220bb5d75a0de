/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <vector>

#include "dsi/localization.hpp"
#include "dsi/types.hpp"

namespace dsi {

/// Inflation coefficients alpha_1..alpha_Na of the multiple-data-assimilation
/// schedule. Sampling the correct posterior in the linear-Gaussian case
/// requires sum(1/alpha_k) = 1, enforced here to 1e-9.
class MdaSchedule {
public:
    explicit MdaSchedule(std::vector<double> alphas);

    /// The common choice alpha_k = n for k = 1..n.
    static MdaSchedule uniform(int n);

    const std::vector<double>& alphas() const { return alphas_; }
    int iterations() const { return static_cast<int>(alphas_.size()); }

private:
    std::vector<double> alphas_;
};

struct EsmdaConfig {
    MdaSchedule schedule = MdaSchedule::uniform(4);
    double energy = 0.99; ///< singular-value energy kept in the subspace inversion
    LocalizationSpec localization{};
    std::uint64_t seed = 0;
    /// Kinds whose negative final estimates are truncated to zero. Applied to
    /// the final ensemble only, never between the MDA iterations.
    std::set<DataKind> truncate_negative = {DataKind::water_rate};
    int threads = 1; ///< member-parallel perturbation draws; results identical for any value

    void validate() const;
};

/// Kalman gain estimated from the current ensemble anomalies,
///
///   K = DD * DDh' * (DDh * DDh' + alpha * Ce)^-1,
///
/// with the inverse applied through the subspace factorization.
Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& anomalies,
                            const Eigen::MatrixXd& history_anomalies,
                            const Eigen::VectorXd& ce_diag, double alpha, double energy);

/// One smoother update with inflated observation noise:
/// d_j <- d_j + (R o K)(d_obs + sqrt(alpha) e_j - d_h,j), e_j ~ N(0, Ce).
///
/// The perturbation of member j is drawn from an engine keyed on
/// (seed, iteration, j), so replays are bit-identical under any threading.
EnsembleMatrix esmda_step(const EnsembleMatrix& ens, const Observations& obs, double alpha,
                          const LocalizationMatrix& taper, std::uint64_t seed, int iteration,
                          double energy = 0.99, int threads = 1);

/// Full inversion: applies esmda_step once per schedule entry, then clamps
/// negative final values of the configured kinds to zero.
EnsembleMatrix run_dsi_esmda(const EnsembleMatrix& prior, const Observations& obs,
                             const EsmdaConfig& config);

} // namespace dsi
