/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <doctest.h>

#include <cmath>
#include <limits>

#include "dsi/errors.hpp"
#include "dsi/optim.hpp"

namespace {

// Convex diagonal quadratic with eigenvalues spread geometrically up to `kappa`.
dsi::ObjectiveFn diagonal_quadratic(const Eigen::VectorXd& diag, const Eigen::VectorXd& center) {
    return [diag, center](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const Eigen::VectorXd r = x - center;
        grad = diag.cwiseProduct(r);
        return 0.5 * r.dot(grad);
    };
}

} // namespace

TEST_CASE("quadratic reaches gradient norm 1e-8 within twice the dimension") {
    const int n = 30;
    Eigen::VectorXd diag(n), center(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = std::pow(10.0, double(i) / (n - 1));
        center[i] = std::cos(1.7 * i) * 3.0;
    }
    dsi::OptimizerConfig cfg;
    cfg.grad_tol = 1e-8;
    cfg.grad_tol_relative = false;
    cfg.max_iterations = 2000;
    const auto res = dsi::lbfgs_minimize(diagonal_quadratic(diag, center),
                                         Eigen::VectorXd::Zero(n), cfg);
    CHECK(res.converged);
    CHECK(res.grad_norm <= 1e-8);
    CHECK(res.iterations <= 2 * n);
    CHECK((res.x - center).norm() <= 1e-7 * center.norm());
}

TEST_CASE("ill-conditioned quadratic still converges under the relative stop") {
    const int n = 12;
    Eigen::VectorXd diag(n), center(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = std::pow(1e4, double(i) / (n - 1));
        center[i] = 1.0 + 0.1 * i;
    }
    dsi::OptimizerConfig cfg;
    cfg.max_iterations = 2000;
    const auto res = dsi::lbfgs_minimize(diagonal_quadratic(diag, center),
                                         Eigen::VectorXd::Zero(n), cfg);
    CHECK(res.converged);
    CHECK((res.x - center).norm() <= 1e-4 * center.norm());
}

TEST_CASE("rosenbrock valley is followed to the minimizer") {
    dsi::ObjectiveFn rosenbrock = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        grad.resize(2);
        grad[0] = -2.0 * a - 400.0 * x[0] * b;
        grad[1] = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    dsi::OptimizerConfig cfg;
    cfg.grad_tol = 1e-10;
    const auto res = dsi::lbfgs_minimize(rosenbrock, x0, cfg);
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("starting at the minimizer stops immediately") {
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(4, 2.0);
    Eigen::VectorXd center = Eigen::VectorXd::Constant(4, 1.5);
    const auto res = dsi::lbfgs_minimize(diagonal_quadratic(diag, center), center, {});
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.evaluations == 1);
    CHECK(res.grad_norm == 0.0);
}

TEST_CASE("memory of one correction pair still minimizes") {
    const int n = 5;
    Eigen::VectorXd diag(n), center(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = 1.0 + i;
        center[i] = 0.5 * (i + 1);
    }
    dsi::OptimizerConfig cfg;
    cfg.memory = 1;
    cfg.max_iterations = 400;
    const auto res = dsi::lbfgs_minimize(diagonal_quadratic(diag, center),
                                         Eigen::VectorXd::Zero(n), cfg);
    CHECK(res.converged);
    CHECK((res.x - center).norm() <= 1e-4);
}

TEST_CASE("descent without curvature ends unconverged at the best iterate") {
    // Linear objective: every direction keeps a unit slope, so the curvature
    // condition can never hold and the search must give up cleanly.
    dsi::ObjectiveFn slope = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        grad = Eigen::VectorXd::Ones(x.size());
        return x.sum();
    };
    const auto res = dsi::lbfgs_minimize(slope, Eigen::VectorXd::Zero(3), {});
    CHECK_FALSE(res.converged);
    CHECK(std::isfinite(res.objective));
    CHECK(res.grad_norm == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("optimizer configuration is validated") {
    dsi::OptimizerConfig cfg;
    cfg.memory = 0;
    CHECK_THROWS_AS(cfg.validate(), dsi::ConfigError);
    cfg = {};
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), dsi::ConfigError);
    cfg = {};
    cfg.c1 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), dsi::ConfigError);
    cfg = {};
    cfg.c1 = 0.95;
    cfg.c2 = 0.9;
    CHECK_THROWS_AS(cfg.validate(), dsi::ConfigError);
    cfg = {};
    cfg.c2 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), dsi::ConfigError);
    cfg = {};
    cfg.grad_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), dsi::ConfigError);
    CHECK_NOTHROW(dsi::OptimizerConfig{}.validate());
}

TEST_CASE("degenerate start points are rejected") {
    dsi::ObjectiveFn quad = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        grad = x;
        return 0.5 * x.squaredNorm();
    };
    CHECK_THROWS_AS(dsi::lbfgs_minimize(quad, Eigen::VectorXd(), {}), dsi::ConfigError);

    dsi::ObjectiveFn bad = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        grad = x;
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(dsi::lbfgs_minimize(bad, Eigen::VectorXd::Ones(2), {}),
                    dsi::NumericalError);
}
