/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dsi {

Eigen::MatrixXd anomaly_matrix(const EnsembleMatrix& ens, RowSubset subset) {
    const Eigen::Index n_members = ens.members();
    if (n_members < 2)
        throw DataError("degenerate ensemble: need at least 2 members");

    Eigen::MatrixXd d =
        subset == RowSubset::history ? ens.history_rows() : ens.data();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_members - 1));
    d = scale * (d.colwise() - d.rowwise().mean());
    return d;
}

TruncatedSvd truncated_svd_energy(const Eigen::MatrixXd& a, double energy, Eigen::Index max_rank) {
    if (!(energy > 0.0) || energy > 1.0)
        throw ConfigError("energy threshold must be in (0, 1], got " + std::to_string(energy));
    if (!a.allFinite())
        throw DataError("matrix contains non-finite values");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    const Eigen::VectorXd& sigma = svd.singularValues();

    Eigen::Index n_candidates = sigma.size();
    if (max_rank >= 0)
        n_candidates = std::min(n_candidates, max_rank);

    // Drop numerically zero singular values so they enter neither the energy
    // budget nor the retained set.
    const double tol = static_cast<double>(std::max(a.rows(), a.cols())) *
                       std::numeric_limits<double>::epsilon() * (sigma.size() > 0 ? sigma[0] : 0.0);
    while (n_candidates > 0 && sigma[n_candidates - 1] <= tol)
        --n_candidates;
    if (n_candidates == 0)
        throw NumericalError("rank zero");

    const double total = sigma.head(n_candidates).sum();
    // Tiny slack so energy == 1 is reachable despite round-off in the sums.
    const double target = energy * total * (1.0 - 1e-12);
    double running = 0.0;
    Eigen::Index rank = n_candidates;
    for (Eigen::Index i = 0; i < n_candidates; ++i) {
        running += sigma[i];
        if (running >= target) {
            rank = i + 1;
            break;
        }
    }

    TruncatedSvd out;
    out.rank = rank;
    out.left_vectors = svd.matrixU().leftCols(rank);
    out.singular_values = sigma.head(rank);
    out.energy_kept = sigma.head(rank).sum() / total;
    return out;
}

SubspaceInverse::SubspaceInverse(const Eigen::MatrixXd& history_anomalies,
                                 const Eigen::VectorXd& ce_diag, double alpha, double energy,
                                 Eigen::Index max_rank)
    : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ConfigError("inflation coefficient must be positive, got " + std::to_string(alpha));
    if (ce_diag.size() != history_anomalies.rows())
        throw DataError("Ce diagonal has " + std::to_string(ce_diag.size()) + " entries but " +
                        std::to_string(history_anomalies.rows()) + " history rows");
    if (!(ce_diag.array() > 0.0).all() || !ce_diag.allFinite())
        throw DataError("Ce diagonal must be strictly positive");

    inv_std_ = ce_diag.cwiseSqrt().cwiseInverse();

    if (history_anomalies.size() == 0 || history_anomalies.isZero(0.0)) {
        rank_ = 0;
        energy_kept_ = 0.0;
        return;
    }

    const Eigen::MatrixXd scaled = inv_std_.asDiagonal() * history_anomalies;
    TruncatedSvd svd = truncated_svd_energy(scaled, energy, max_rank);
    rank_ = svd.rank;
    energy_kept_ = svd.energy_kept;
    basis_ = inv_std_.asDiagonal() * svd.left_vectors;
    gain_diag_ =
        (svd.singular_values.array().square() + alpha).inverse().matrix();
}

Eigen::MatrixXd SubspaceInverse::apply(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != inv_std_.size())
        throw DataError("rhs has " + std::to_string(rhs.rows()) + " rows, expected " +
                        std::to_string(inv_std_.size()));
    if (rank_ == 0) {
        // Zero anomalies: the operator is exactly alpha * Ce.
        return (inv_std_.array().square() / alpha_).matrix().asDiagonal() * rhs;
    }
    return basis_ * (gain_diag_.asDiagonal() * (basis_.transpose() * rhs));
}

Eigen::VectorXd SubspaceInverse::apply(const Eigen::VectorXd& rhs) const {
    return apply(Eigen::MatrixXd(rhs)).col(0);
}

Eigen::VectorXd subspace_inverse_apply(const Eigen::MatrixXd& history_anomalies,
                                       const Eigen::VectorXd& ce_diag, double alpha, double energy,
                                       const Eigen::VectorXd& rhs) {
    return SubspaceInverse(history_anomalies, ce_diag, alpha, energy).apply(rhs);
}

} // namespace dsi
