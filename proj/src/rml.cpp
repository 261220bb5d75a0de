/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/rml.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsi/ensemble.hpp"
#include "dsi/errors.hpp"
#include "dsi/parallel.hpp"
#include "dsi/random.hpp"

namespace dsi {

PcaModel fit_pca(const EnsembleMatrix& prior, double energy, const Eigen::VectorXd& row_scale) {
    const Eigen::Index n_rows = prior.size();
    Eigen::MatrixXd anomalies = anomaly_matrix(prior, RowSubset::all);

    const bool rescaled = row_scale.size() > 0;
    if (rescaled) {
        if (row_scale.size() != n_rows)
            throw DataError("row scale has " + std::to_string(row_scale.size()) +
                            " entries, layout has " + std::to_string(n_rows));
        if (!(row_scale.minCoeff() > 0.0))
            throw DataError("row scale entries must be strictly positive");
        anomalies = row_scale.cwiseInverse().asDiagonal() * anomalies;
    }

    const TruncatedSvd svd = truncated_svd_energy(anomalies, energy, prior.members() - 1);

    PcaModel model;
    model.mean = prior.data().rowwise().mean();
    model.half_cov = svd.left_vectors * svd.singular_values.asDiagonal();
    if (rescaled)
        model.half_cov = row_scale.asDiagonal() * model.half_cov;
    model.rank = svd.rank;
    return model;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty())
        throw DataError("empirical CDF needs at least one sample");
    for (double v : sorted_)
        if (!std::isfinite(v))
            throw DataError("empirical CDF samples must be finite");
    std::sort(sorted_.begin(), sorted_.end());
    const double n = static_cast<double>(sorted_.size());
    positions_.resize(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i)
        positions_[i] = (static_cast<double>(i) + 0.5) / n;
}

double EmpiricalCdf::cdf(double value) const {
    if (value <= sorted_.front())
        return positions_.front();
    if (value >= sorted_.back())
        return positions_.back();
    // First sample strictly above `value`; its predecessor is <= value, so
    // the bracketing segment has strictly positive width.
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), value);
    const std::size_t hi = static_cast<std::size_t>(it - sorted_.begin());
    const std::size_t lo = hi - 1;
    const double t = (value - sorted_[lo]) / (sorted_[hi] - sorted_[lo]);
    return positions_[lo] + t * (positions_[hi] - positions_[lo]);
}

double EmpiricalCdf::quantile(double p) const {
    if (p <= positions_.front())
        return sorted_.front();
    if (p >= positions_.back())
        return sorted_.back();
    const auto it = std::upper_bound(positions_.begin(), positions_.end(), p);
    const std::size_t hi = static_cast<std::size_t>(it - positions_.begin());
    const std::size_t lo = hi - 1;
    const double t = (p - positions_[lo]) / (positions_[hi] - positions_[lo]);
    return sorted_[lo] + t * (sorted_[hi] - sorted_[lo]);
}

Anamorphosis Anamorphosis::fit(const EnsembleMatrix& prior, const PcaModel& pca,
                               std::uint64_t seed) {
    const Eigen::Index n_rows = prior.size();
    if (pca.mean.size() != n_rows)
        throw DataError("model has " + std::to_string(pca.mean.size()) + " rows, ensemble has " +
                        std::to_string(n_rows));

    // Model marginals are estimated from as many draws as the prior has
    // members, from a fixed substream of the run seed.
    const Eigen::Index n_draws = prior.members();
    auto engine = make_engine(seed, RngUse::anamorphosis);
    const Eigen::MatrixXd coeffs = standard_normal_matrix(pca.rank, n_draws, engine);
    Eigen::MatrixXd model_samples = pca.half_cov * coeffs;
    model_samples.colwise() += pca.mean;

    Anamorphosis out;
    out.target_.reserve(static_cast<std::size_t>(n_rows));
    out.model_.reserve(static_cast<std::size_t>(n_rows));
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        const auto row_vector = [](const Eigen::MatrixXd& m, Eigen::Index row) {
            return std::vector<double>(m.row(row).begin(), m.row(row).end());
        };
        out.target_.emplace_back(row_vector(prior.data(), i));
        out.model_.emplace_back(row_vector(model_samples, i));
    }
    return out;
}

double Anamorphosis::transform_element(double value, Eigen::Index element) const {
    const auto i = static_cast<std::size_t>(element);
    return target_[i].quantile(model_[i].cdf(value));
}

Eigen::VectorXd Anamorphosis::transform(const Eigen::VectorXd& values,
                                        const std::vector<Eigen::Index>& rows) const {
    Eigen::VectorXd out(values.size());
    if (rows.empty()) {
        if (values.size() != elements())
            throw DataError("value vector has " + std::to_string(values.size()) +
                            " entries, transform has " + std::to_string(elements()));
        for (Eigen::Index k = 0; k < values.size(); ++k)
            out[k] = transform_element(values[k], k);
        return out;
    }
    if (static_cast<std::size_t>(values.size()) != rows.size())
        throw DataError("value vector has " + std::to_string(values.size()) +
                        " entries, row list has " + std::to_string(rows.size()));
    for (Eigen::Index k = 0; k < values.size(); ++k)
        out[k] = transform_element(values[k], rows[static_cast<std::size_t>(k)]);
    return out;
}

double rml_objective_and_gradient(const Eigen::VectorXd& x, const RmlProblem& prob,
                                  Eigen::VectorXd& grad) {
    const RmlModel& m = *prob.model;
    const Eigen::VectorXd d_h = m.mean_h + m.half_cov_h * x;
    const Eigen::VectorXd coeff_residual = x - prob.prior_coeff;

    // Objective uses the transformed prediction; the gradient keeps the raw
    // one (the transform Jacobian is dropped on purpose).
    const Eigen::VectorXd prediction =
        m.anamorphosis ? m.anamorphosis->transform(d_h, m.history_rows) : d_h;
    const Eigen::VectorXd data_residual = prob.perturbed_obs - prediction;
    const double value =
        0.5 * (data_residual.array().square() * m.ce_inv_diag.array()).sum() +
        0.5 * coeff_residual.squaredNorm();

    grad = m.half_cov_h.transpose() * m.ce_inv_diag.cwiseProduct(d_h - prob.perturbed_obs) +
           coeff_residual;
    return value;
}

void RmlConfig::validate() const {
    if (!(energy > 0.0) || energy > 1.0)
        throw ConfigError("energy threshold must be in (0, 1]");
    if (n_samples < 0)
        throw ConfigError("sample count must be non-negative");
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
    optimizer.validate();
}

int RmlResult::n_converged() const {
    int n = 0;
    for (const auto& s : status)
        n += s.converged ? 1 : 0;
    return n;
}

RmlResult run_dsi_rml(const EnsembleMatrix& prior, const Observations& obs,
                      const RmlConfig& config) {
    config.validate();
    obs.validate(prior.layout());

    const DataLayout& layout = prior.layout();
    Eigen::VectorXd row_scale;
    if (config.rescale_by_ce) {
        // Whitening scale: the observation error std on history rows, the
        // layout noise std elsewhere; every entry must be positive.
        row_scale.resize(prior.size());
        for (Eigen::Index i = 0; i < prior.size(); ++i)
            row_scale[i] = layout[i].noise_std;
        const auto& hist = layout.history_indices();
        for (std::size_t k = 0; k < hist.size(); ++k)
            row_scale[hist[k]] = obs.error_std[static_cast<Eigen::Index>(k)];
        if (!(row_scale.minCoeff() > 0.0))
            throw DataError("rescaling requires a positive noise std on every element");
    }

    RmlModel model;
    model.pca = fit_pca(prior, config.energy, row_scale);
    if (config.anamorphosis)
        model.anamorphosis = Anamorphosis::fit(prior, model.pca, config.seed);
    model.history_rows = layout.history_indices();
    model.mean_h = model.pca.mean(model.history_rows);
    model.half_cov_h = model.pca.half_cov(model.history_rows, Eigen::all);
    model.ce_inv_diag = obs.ce_diag().cwiseInverse();

    const Eigen::Index n_samples =
        config.n_samples > 0 ? static_cast<Eigen::Index>(config.n_samples) : prior.members();
    if (n_samples < 2)
        throw ConfigError("needs at least two posterior samples");
    const Eigen::Index n_hist = static_cast<Eigen::Index>(model.history_rows.size());

    Eigen::MatrixXd posterior(prior.size(), n_samples);
    std::vector<RmlSampleStatus> status(static_cast<std::size_t>(n_samples));

    parallel_for_index(n_samples, config.threads, [&](Eigen::Index j) {
        auto engine =
            make_engine(config.seed, RngUse::rml_sample, static_cast<std::uint64_t>(j));
        RmlProblem prob;
        prob.model = &model;
        prob.prior_coeff = standard_normal_vector(model.pca.rank, engine);
        const Eigen::VectorXd noise = standard_normal_vector(n_hist, engine);
        prob.perturbed_obs = obs.values + obs.error_std.cwiseProduct(noise);

        const ObjectiveFn objective = [&prob](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
            return rml_objective_and_gradient(x, prob, grad);
        };
        const OptimizeResult opt = lbfgs_minimize(objective, prob.prior_coeff, config.optimizer);

        Eigen::VectorXd d = model.pca.reconstruct(opt.x);
        if (model.anamorphosis)
            d = model.anamorphosis->transform(d);
        posterior.col(j) = d;
        status[static_cast<std::size_t>(j)] = {opt.converged, opt.iterations, opt.grad_norm,
                                               opt.objective};
    });

    RmlResult result{EnsembleMatrix(std::move(posterior), prior.layout_ptr()), std::move(status),
                     model.pca.rank};
    return result;
}

} // namespace dsi
