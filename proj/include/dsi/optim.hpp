/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <functional>

namespace dsi {

/// Objective callback: returns the value at x and fills `grad`.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct OptimizerConfig {
    int memory = 10;          ///< stored correction pairs
    int max_iterations = 500;
    double c1 = 1e-4;         ///< sufficient-decrease constant
    double c2 = 0.9;          ///< curvature constant
    double grad_tol = 1e-6;
    /// true: stop at ||g|| <= grad_tol * (1 + |f|); false: ||g|| <= grad_tol.
    bool grad_tol_relative = true;

    void validate() const;
};

struct OptimizeResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Limited-memory BFGS with the two-loop recursion and a strong Wolfe line
/// search. Non-convergence is reported in the result, never thrown.
OptimizeResult lbfgs_minimize(const ObjectiveFn& objective, Eigen::VectorXd x0,
                              const OptimizerConfig& config = {});

} // namespace dsi
