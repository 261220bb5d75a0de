/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/esmda.hpp"

#include <cmath>
#include <string>

#include "dsi/ensemble.hpp"
#include "dsi/parallel.hpp"
#include "dsi/random.hpp"

namespace dsi {

MdaSchedule::MdaSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
    if (alphas_.empty())
        throw ConfigError("alpha schedule is empty");
    double inv_sum = 0.0;
    for (double a : alphas_) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw ConfigError("alpha coefficients must be positive");
        inv_sum += 1.0 / a;
    }
    if (std::abs(inv_sum - 1.0) > 1e-9)
        throw ConfigError("alpha schedule does not sum to one: sum(1/alpha) = " +
                          std::to_string(inv_sum));
}

MdaSchedule MdaSchedule::uniform(int n) {
    if (n < 1)
        throw ConfigError("schedule needs at least one iteration");
    return MdaSchedule(std::vector<double>(static_cast<std::size_t>(n), static_cast<double>(n)));
}

void EsmdaConfig::validate() const {
    if (!(energy > 0.0) || energy > 1.0)
        throw ConfigError("energy threshold must be in (0, 1]");
    localization.validate();
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
}

Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& anomalies,
                            const Eigen::MatrixXd& history_anomalies,
                            const Eigen::VectorXd& ce_diag, double alpha, double energy) {
    if (anomalies.cols() != history_anomalies.cols())
        throw DataError("anomaly matrices disagree on member count");

    const Eigen::Index n_members = anomalies.cols();
    const SubspaceInverse inv(history_anomalies, ce_diag, alpha, energy, n_members - 1);

    if (inv.rank() == 0) {
        // Zero history anomalies: DD * DDh' vanishes and so does the gain.
        return Eigen::MatrixXd::Zero(anomalies.rows(), history_anomalies.rows());
    }

    // K = DD * (DDh' * M) with M the factored inverse applied to the identity.
    const Eigen::MatrixXd identity =
        Eigen::MatrixXd::Identity(history_anomalies.rows(), history_anomalies.rows());
    return anomalies * (history_anomalies.transpose() * inv.apply(identity));
}

EnsembleMatrix esmda_step(const EnsembleMatrix& ens, const Observations& obs, double alpha,
                          const LocalizationMatrix& taper, std::uint64_t seed, int iteration,
                          double energy, int threads) {
    obs.validate(ens.layout());
    const Eigen::Index n_hist = ens.layout().history_size();
    const Eigen::Index n_members = ens.members();
    if (taper.values.rows() != ens.size() || taper.values.cols() != n_hist)
        throw DataError("localization matrix is " + std::to_string(taper.values.rows()) + "x" +
                        std::to_string(taper.values.cols()) + ", expected " +
                        std::to_string(ens.size()) + "x" + std::to_string(n_hist));

    const Eigen::MatrixXd dd = anomaly_matrix(ens, RowSubset::all);
    const Eigen::MatrixXd dd_hist = anomaly_matrix(ens, RowSubset::history);
    const Eigen::VectorXd ce_diag = obs.ce_diag();

    Eigen::MatrixXd gain = kalman_gain(dd, dd_hist, ce_diag, alpha, energy);
    gain = gain.cwiseProduct(taper.values);

    // Innovations d_obs + sqrt(alpha) e_j - d_h,j with per-member noise.
    const double noise_scale = std::sqrt(alpha);
    Eigen::MatrixXd innovations = -ens.history_rows();
    innovations.colwise() += obs.values;
    parallel_for_index(n_members, threads, [&](Eigen::Index j) {
        auto engine = make_engine(seed, RngUse::esmda_perturbation,
                                  (static_cast<std::uint64_t>(iteration) << 32) |
                                      static_cast<std::uint64_t>(j));
        const Eigen::VectorXd noise = standard_normal_vector(n_hist, engine);
        innovations.col(j) += noise_scale * obs.error_std.cwiseProduct(noise);
    });

    Eigen::MatrixXd updated = ens.data() + gain * innovations;
    return EnsembleMatrix(std::move(updated), ens.layout_ptr());
}

EnsembleMatrix run_dsi_esmda(const EnsembleMatrix& prior, const Observations& obs,
                             const EsmdaConfig& config) {
    config.validate();
    obs.validate(prior.layout());

    const LocalizationMatrix taper = build_localization(prior.layout(), config.localization);

    EnsembleMatrix current = prior;
    const auto& alphas = config.schedule.alphas();
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        current = esmda_step(current, obs, alphas[k], taper, config.seed, static_cast<int>(k + 1),
                             config.energy, config.threads);
    }

    if (config.truncate_negative.empty())
        return current;

    // Negative values of the configured kinds are clamped on the final
    // estimates only, never between the iterations.
    Eigen::MatrixXd data = current.data();
    const DataLayout& layout = current.layout();
    for (Eigen::Index i = 0; i < layout.size(); ++i) {
        if (config.truncate_negative.count(layout[i].kind) > 0)
            data.row(i) = data.row(i).cwiseMax(0.0);
    }
    return EnsembleMatrix(std::move(data), current.layout_ptr());
}

} // namespace dsi
