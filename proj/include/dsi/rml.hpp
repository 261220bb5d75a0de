/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dsi/optim.hpp"
#include "dsi/types.hpp"

namespace dsi {

/// Low-rank Gaussian model of the predicted-data vector,
/// d(x) = mean + half_cov * x with x standard normal.
struct PcaModel {
    Eigen::VectorXd mean;     ///< N_d
    Eigen::MatrixXd half_cov; ///< N_d x N_r; half_cov * half_cov' is the retained covariance
    Eigen::Index rank = 0;

    Eigen::VectorXd reconstruct(const Eigen::VectorXd& x) const { return mean + half_cov * x; }
};

/// Fits the model by energy-truncated SVD of the prior anomaly matrix.
///
/// A non-empty `row_scale` whitens the rows before the SVD and colors the
/// retained basis back, so truncation is decided on scale-free data. All
/// scale entries must be strictly positive.
PcaModel fit_pca(const EnsembleMatrix& prior, double energy,
                 const Eigen::VectorXd& row_scale = Eigen::VectorXd());

/// Piecewise-linear empirical CDF over a fixed sample set, using plotting
/// positions (i - 0.5)/n at the sorted samples. cdf() clamps outside the
/// sample range; quantile() is its inverse back onto the sample range.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples);

    double cdf(double value) const;
    double quantile(double p) const;

    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }

private:
    std::vector<double> sorted_;
    std::vector<double> positions_;
};

/// Per-element marginal transform from the low-rank Gaussian model onto the
/// prior marginals: element i maps through target_cdf_i^-1(model_cdf_i(.)).
/// The model CDFs are built from a fixed-seed batch of model draws.
class Anamorphosis {
public:
    static Anamorphosis fit(const EnsembleMatrix& prior, const PcaModel& pca, std::uint64_t seed);

    double transform_element(double value, Eigen::Index element) const;

    /// Transforms values[k] as element rows[k]; `rows` empty means 0..N_d-1.
    Eigen::VectorXd transform(const Eigen::VectorXd& values,
                              const std::vector<Eigen::Index>& rows = {}) const;

    Eigen::Index elements() const { return static_cast<Eigen::Index>(target_.size()); }

private:
    Anamorphosis() = default;

    std::vector<EmpiricalCdf> target_; ///< prior marginals, one per element
    std::vector<EmpiricalCdf> model_;  ///< low-rank model marginals, one per element
};

/// Read-only state shared by every minimization of one inversion run.
struct RmlModel {
    PcaModel pca;
    std::optional<Anamorphosis> anamorphosis;
    std::vector<Eigen::Index> history_rows;
    Eigen::VectorXd mean_h;      ///< history rows of pca.mean
    Eigen::MatrixXd half_cov_h;  ///< history rows of pca.half_cov
    Eigen::VectorXd ce_inv_diag; ///< 1 / Ce diagonal
};

/// One minimization instance: perturbed observations and a prior coefficient
/// draw on top of the shared model.
struct RmlProblem {
    const RmlModel* model = nullptr;
    Eigen::VectorXd perturbed_obs; ///< d_obs*
    Eigen::VectorXd prior_coeff;   ///< x*
};

/// Objective
///   1/2 (d_obs* - dhat_h(x))' Ce^-1 (d_obs* - dhat_h(x)) + 1/2 |x - x*|^2
/// where dhat_h is the transformed prediction when anamorphosis is present
/// and the raw one otherwise. The gradient is the analytic gradient of the
/// untransformed objective (the transform Jacobian is deliberately dropped):
///   half_cov_h' Ce^-1 (d_h(x) - d_obs*) + (x - x*).
double rml_objective_and_gradient(const Eigen::VectorXd& x, const RmlProblem& prob,
                                  Eigen::VectorXd& grad);

struct RmlConfig {
    double energy = 0.99;
    int n_samples = 0; ///< 0 means one per prior member
    bool anamorphosis = true;
    /// Whiten rows by their noise std before the PCA truncation. Requires a
    /// positive noise std on every element of the layout.
    bool rescale_by_ce = false;
    OptimizerConfig optimizer{};
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct RmlSampleStatus {
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
    double objective = 0.0;
};

struct RmlResult {
    EnsembleMatrix posterior;
    std::vector<RmlSampleStatus> status; ///< one per posterior sample
    Eigen::Index pca_rank = 0;

    int n_converged() const;
};

/// Posterior sampling by randomized maximum likelihood: each sample draws
/// (d_obs*, x*), minimizes the objective with the limited-memory optimizer,
/// and maps the minimizer back through the model (and the anamorphosis when
/// enabled). Non-converged samples are kept and flagged in `status`.
RmlResult run_dsi_rml(const EnsembleMatrix& prior, const Observations& obs,
                      const RmlConfig& config);

} // namespace dsi
