/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsi/errors.hpp"

namespace dsi {

MismatchReport normalized_mismatch(const EnsembleMatrix& ens, const Observations& obs) {
    obs.validate(ens.layout());
    const Eigen::Index n_hist = ens.layout().history_size();
    if (n_hist == 0)
        throw DataError("layout has no history elements");

    const Eigen::MatrixXd predicted = ens.history_rows();
    MismatchReport report;
    report.per_member.resize(ens.members());
    const double scale = 1.0 / (2.0 * static_cast<double>(n_hist));
    for (Eigen::Index j = 0; j < ens.members(); ++j) {
        const Eigen::ArrayXd z = (obs.values - predicted.col(j)).array() / obs.error_std.array();
        report.per_member[j] = scale * z.square().sum();
    }
    report.mean = report.per_member.mean();
    report.std = std::sqrt((report.per_member.array() - report.mean).square().sum() /
                           static_cast<double>(ens.members() - 1));
    return report;
}

namespace {

// Type-7 quantile of a sorted sample: h = (n-1) p, linear between neighbors.
double sorted_quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n)
        return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

Eigen::MatrixXd percentiles(const EnsembleMatrix& ens, const std::vector<double>& probs) {
    for (double p : probs)
        if (!(p > 0.0) || !(p < 1.0))
            throw ConfigError("percentile probabilities must lie in (0, 1)");

    Eigen::MatrixXd out(ens.size(), static_cast<Eigen::Index>(probs.size()));
    std::vector<double> row(static_cast<std::size_t>(ens.members()));
    for (Eigen::Index i = 0; i < ens.size(); ++i) {
        for (Eigen::Index j = 0; j < ens.members(); ++j)
            row[static_cast<std::size_t>(j)] = ens.data()(i, j);
        std::sort(row.begin(), row.end());
        for (std::size_t k = 0; k < probs.size(); ++k)
            out(i, static_cast<Eigen::Index>(k)) = sorted_quantile(row, probs[k]);
    }
    return out;
}

PercentileBand percentile_band(const EnsembleMatrix& ens) {
    const Eigen::MatrixXd q = percentiles(ens, {0.1, 0.5, 0.9});
    return {q.col(0), q.col(1), q.col(2)};
}

double coverage(const EnsembleMatrix& ens, const Eigen::VectorXd& reference, double lo,
                double hi) {
    if (reference.size() != ens.size())
        throw DataError("reference has " + std::to_string(reference.size()) +
                        " entries, ensemble has " + std::to_string(ens.size()) + " rows");
    if (!(lo > 0.0) || !(hi < 1.0) || !(lo < hi))
        throw ConfigError("coverage band requires 0 < lo < hi < 1");

    const Eigen::MatrixXd q = percentiles(ens, {lo, hi});
    Eigen::Index inside = 0;
    for (Eigen::Index i = 0; i < ens.size(); ++i)
        if (reference[i] >= q(i, 0) && reference[i] <= q(i, 1))
            ++inside;
    return static_cast<double>(inside) / static_cast<double>(ens.size());
}

} // namespace dsi
