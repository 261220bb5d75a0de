/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>

#include "dsi/types.hpp"

namespace dsi {

enum class RowSubset { all, history };

/// Scaled anomaly matrix [d_1 - mean, ..., d_Ne - mean] / sqrt(N_e - 1).
///
/// Its self outer product equals the sample covariance of the ensemble, and
/// the sum of its columns is the zero vector. `RowSubset::history` restricts
/// the rows to the history elements.
Eigen::MatrixXd anomaly_matrix(const EnsembleMatrix& ens, RowSubset subset = RowSubset::all);

/// Energy-truncated thin SVD: the N_r leading singular triplets whose
/// cumulative singular-value sum reaches the requested energy fraction.
struct TruncatedSvd {
    Eigen::MatrixXd left_vectors;    ///< N x N_r, orthonormal columns
    Eigen::VectorXd singular_values; ///< N_r, strictly positive, non-increasing
    Eigen::Index rank = 0;
    double energy_kept = 0.0; ///< attained fraction, >= the requested one
};

/// Keeps the smallest leading set with sum(sigma_i, i<=N_r) / sum(all) >= energy.
///
/// The denominator runs over the numerically nonzero singular values, capped
/// at `max_rank` when non-negative (callers pass N_e - 1 for anomaly
/// matrices, whose rank cannot exceed it). Throws NumericalError("rank zero")
/// for an all-zero matrix, ConfigError for energy outside (0, 1].
TruncatedSvd truncated_svd_energy(const Eigen::MatrixXd& a, double energy,
                                  Eigen::Index max_rank = -1);

/// Factored application of (DDh * DDh' + alpha * Ce)^-1 for diagonal Ce.
///
/// Following the subspace pseudo inversion of Evensen (2004), the inverse is
/// approximated through the truncated SVD of the rescaled anomalies
/// S = Ce^-1/2 * DDh, so that small singular values are removed after the
/// data have been whitened:
///
///   (DDh DDh' + alpha Ce)^-1  ~=  Ce^-1/2 U_r (S_r^2 + alpha I)^-1 U_r' Ce^-1/2.
///
/// The orthogonal complement of U_r is dropped (pure subspace projection);
/// when the truncation is rank-preserving the result equals the dense
/// inverse. A zero anomaly matrix degenerates to the exact diagonal inverse
/// (alpha * Ce)^-1.
class SubspaceInverse {
public:
    SubspaceInverse(const Eigen::MatrixXd& history_anomalies, const Eigen::VectorXd& ce_diag,
                    double alpha, double energy, Eigen::Index max_rank = -1);

    Eigen::MatrixXd apply(const Eigen::MatrixXd& rhs) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& rhs) const;

    Eigen::Index rank() const { return rank_; }
    double energy_kept() const { return energy_kept_; }

private:
    Eigen::VectorXd inv_std_;   ///< Ce^-1/2 diagonal
    Eigen::MatrixXd basis_;     ///< Ce^-1/2 * U_r
    Eigen::VectorXd gain_diag_; ///< 1 / (sigma_i^2 + alpha)
    double alpha_ = 0.0;
    Eigen::Index rank_ = 0;
    double energy_kept_ = 0.0;
};

/// One-shot convenience wrapper around SubspaceInverse.
Eigen::VectorXd subspace_inverse_apply(const Eigen::MatrixXd& history_anomalies,
                                       const Eigen::VectorXd& ce_diag, double alpha, double energy,
                                       const Eigen::VectorXd& rhs);

} // namespace dsi
