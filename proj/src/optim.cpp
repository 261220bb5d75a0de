/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/optim.hpp"

#include "dsi/errors.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace dsi {

namespace {

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); falls back to
// bisection when the interpolant is degenerate or leaves the bracket.
double cubic_step(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    double t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double margin = 0.1 * (hi - lo);
    if (!std::isfinite(t) || t < lo + margin || t > hi - margin) t = 0.5 * (a + b);
    return t;
}

struct LinePoint {
    double alpha;
    double value;
    double slope; // directional derivative g(x + alpha p) . p
};

class LineSearch {
public:
    LineSearch(const ObjectiveFn& objective, const Eigen::VectorXd& x,
               const Eigen::VectorXd& direction, double f0, double slope0,
               const OptimizerConfig& config, int& evaluations)
        : objective_(objective), x_(x), direction_(direction), f0_(f0), slope0_(slope0),
          config_(config), evaluations_(evaluations), grad_(x.size()) {}

    // Strong Wolfe search: bracket then zoom. Returns true when both the
    // sufficient-decrease and curvature conditions hold at the result.
    bool run(LinePoint& out, Eigen::VectorXd& x_out, Eigen::VectorXd& grad_out) {
        LinePoint prev{0.0, f0_, slope0_};
        double alpha = 1.0;
        constexpr int kMaxBracket = 20;
        for (int i = 0; i < kMaxBracket; ++i) {
            LinePoint cur = evaluate(alpha);
            if (cur.value > f0_ + config_.c1 * cur.alpha * slope0_ ||
                (i > 0 && cur.value >= prev.value)) {
                if (approx_acceptable(cur)) return accept(cur, out, x_out, grad_out);
                return zoom(prev, cur, out, x_out, grad_out);
            }
            if (std::abs(cur.slope) <= -config_.c2 * slope0_) {
                return accept(cur, out, x_out, grad_out);
            }
            if (cur.slope >= 0.0) return zoom(cur, prev, out, x_out, grad_out);
            prev = cur;
            alpha *= 2.0;
        }
        return false;
    }

private:
    LinePoint evaluate(double alpha) {
        x_best_ = x_ + alpha * direction_;
        const double value = objective_(x_best_, grad_);
        ++evaluations_;
        return {alpha, value, grad_.dot(direction_)};
    }

    bool accept(const LinePoint& p, LinePoint& out, Eigen::VectorXd& x_out,
                Eigen::VectorXd& grad_out) {
        out = p;
        x_out = x_best_;
        grad_out = grad_;
        return true;
    }

    // Close to the minimizer the sufficient-decrease test drowns in the
    // round-off of the objective; slopes stay accurate, so a point with the
    // curvature condition and a value within noise of f0 is still progress.
    bool approx_acceptable(const LinePoint& p) const {
        return std::abs(p.slope) <= -config_.c2 * slope0_ &&
               p.value <= f0_ + 1e-10 * (1.0 + std::abs(f0_));
    }

    bool zoom(LinePoint lo, LinePoint hi, LinePoint& out, Eigen::VectorXd& x_out,
              Eigen::VectorXd& grad_out) {
        constexpr int kMaxZoom = 30;
        for (int i = 0; i < kMaxZoom; ++i) {
            const double alpha =
                cubic_step(lo.alpha, lo.value, lo.slope, hi.alpha, hi.value, hi.slope);
            LinePoint cur = evaluate(alpha);
            if (cur.value > f0_ + config_.c1 * cur.alpha * slope0_ || cur.value >= lo.value) {
                if (approx_acceptable(cur)) return accept(cur, out, x_out, grad_out);
                hi = cur;
            } else {
                if (std::abs(cur.slope) <= -config_.c2 * slope0_) {
                    return accept(cur, out, x_out, grad_out);
                }
                if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = cur;
            }
            if (std::abs(hi.alpha - lo.alpha) <
                1e-14 * std::max(1.0, std::max(std::abs(lo.alpha), std::abs(hi.alpha)))) {
                break;
            }
        }
        // Bracket collapsed. Accept the best sufficient-decrease point so the
        // outer loop can continue from it.
        if (lo.value < f0_ + config_.c1 * lo.alpha * slope0_ && lo.alpha > 0.0) {
            LinePoint cur = evaluate(lo.alpha);
            return accept(cur, out, x_out, grad_out);
        }
        return false;
    }

    const ObjectiveFn& objective_;
    const Eigen::VectorXd& x_;
    const Eigen::VectorXd& direction_;
    double f0_;
    double slope0_;
    const OptimizerConfig& config_;
    int& evaluations_;
    Eigen::VectorXd grad_;
    Eigen::VectorXd x_best_;
};

} // namespace

void OptimizerConfig::validate() const {
    if (memory < 1) throw ConfigError("optimizer memory must be at least 1");
    if (max_iterations < 1) throw ConfigError("optimizer max_iterations must be at least 1");
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
        throw ConfigError("optimizer requires 0 < c1 < c2 < 1");
    }
    if (!(grad_tol > 0.0)) throw ConfigError("optimizer grad_tol must be positive");
}

OptimizeResult lbfgs_minimize(const ObjectiveFn& objective, Eigen::VectorXd x0,
                              const OptimizerConfig& config) {
    config.validate();
    const Eigen::Index n = x0.size();
    if (n == 0) throw ConfigError("optimizer start point is empty");

    OptimizeResult result;
    result.x = std::move(x0);

    Eigen::VectorXd grad(n);
    double f = objective(result.x, grad);
    result.evaluations = 1;
    if (!std::isfinite(f) || !grad.allFinite()) {
        throw NumericalError("objective not finite at the start point");
    }

    struct Pair {
        Eigen::VectorXd s;
        Eigen::VectorXd y;
        double rho;
    };
    std::deque<Pair> pairs;

    const auto stop_tol = [&](double value) {
        return config.grad_tol_relative ? config.grad_tol * (1.0 + std::abs(value))
                                        : config.grad_tol;
    };

    Eigen::VectorXd direction(n);
    Eigen::VectorXd x_new(n);
    Eigen::VectorXd grad_new(n);
    std::vector<double> beta_stack;

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        result.grad_norm = grad.norm();
        result.objective = f;
        result.iterations = iter;
        if (result.grad_norm <= stop_tol(f)) {
            result.converged = true;
            return result;
        }

        // Two-loop recursion; scale the seed matrix by s.y / y.y.
        direction = -grad;
        beta_stack.assign(pairs.size(), 0.0);
        for (std::size_t i = pairs.size(); i-- > 0;) {
            const Pair& p = pairs[i];
            beta_stack[i] = p.rho * p.s.dot(direction);
            direction -= beta_stack[i] * p.y;
        }
        if (!pairs.empty()) {
            const Pair& last = pairs.back();
            direction *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const Pair& p = pairs[i];
            const double gamma = p.rho * p.y.dot(direction);
            direction += (beta_stack[i] - gamma) * p.s;
        }

        double slope = grad.dot(direction);
        if (!(slope < 0.0)) {
            // Curvature information went stale; restart from steepest descent.
            pairs.clear();
            direction = -grad;
            slope = -grad.squaredNorm();
        }
        if (pairs.empty()) {
            // First step (or restart): unit-length trial keeps the search bounded.
            const double scale = 1.0 / std::max(1.0, result.grad_norm);
            direction *= scale;
            slope *= scale;
        }

        LinePoint accepted{};
        LineSearch search(objective, result.x, direction, f, slope, config, result.evaluations);
        if (!search.run(accepted, x_new, grad_new)) {
            if (pairs.empty()) {
                return result; // steepest descent made no progress; converged stays false
            }
            // Drop the quasi-Newton memory and retry the step along -grad.
            pairs.clear();
            continue;
        }

        Pair pair;
        pair.s = x_new - result.x;
        pair.y = grad_new - grad;
        const double sy = pair.s.dot(pair.y);
        if (sy > 1e-12 * pair.s.norm() * pair.y.norm()) {
            pair.rho = 1.0 / sy;
            pairs.push_back(std::move(pair));
            if (pairs.size() > static_cast<std::size_t>(config.memory)) pairs.pop_front();
        }

        result.x.swap(x_new);
        grad.swap(grad_new);
        f = accepted.value;
    }

    result.grad_norm = grad.norm();
    result.objective = f;
    result.iterations = config.max_iterations;
    result.converged = result.grad_norm <= stop_tol(f);
    return result;
}

} // namespace dsi
