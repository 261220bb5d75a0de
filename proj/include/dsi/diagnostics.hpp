/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dsi/types.hpp"

namespace dsi {

/// Normalized data mismatch per member,
///   O_Nd = 1/(2 N_dh) * sum_i ((d_obs,i - d_h,i) / sigma_e,i)^2,
/// with its mean and sample standard deviation across the ensemble. A member
/// sitting exactly k standard deviations from every observation scores k^2/2.
struct MismatchReport {
    Eigen::VectorXd per_member;
    double mean = 0.0;
    double std = 0.0;
};

MismatchReport normalized_mismatch(const EnsembleMatrix& ens, const Observations& obs);

/// Per-element empirical quantiles, one column per probability. Linear
/// interpolation of order statistics (type-7 convention: h = (n-1) p).
Eigen::MatrixXd percentiles(const EnsembleMatrix& ens, const std::vector<double>& probs);

struct PercentileBand {
    Eigen::VectorXd p10;
    Eigen::VectorXd p50;
    Eigen::VectorXd p90;
};

PercentileBand percentile_band(const EnsembleMatrix& ens);

/// Fraction of elements whose reference value falls inside the ensemble's
/// [lo, hi] percentile band (bounds inclusive).
double coverage(const EnsembleMatrix& ens, const Eigen::VectorXd& reference, double lo, double hi);

} // namespace dsi
