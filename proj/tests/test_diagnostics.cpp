/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <doctest.h>

#include <memory>
#include <vector>

#include "dsi/diagnostics.hpp"
#include "dsi/errors.hpp"
#include "dsi/random.hpp"

namespace {

std::shared_ptr<const dsi::DataLayout> plain_layout(int n_history, int n_forecast) {
    std::vector<dsi::DataElement> elems;
    for (int i = 0; i < n_history + n_forecast; ++i) {
        dsi::DataElement e;
        e.id = "e" + std::to_string(i);
        e.well_id = "W";
        e.time = 30.0 * (i + 1);
        e.is_history = i < n_history;
        e.noise_std = e.is_history ? 1.0 : 0.0;
        elems.push_back(e);
    }
    return std::make_shared<dsi::DataLayout>(std::move(elems));
}

} // namespace

TEST_CASE("mismatch scores sigma offsets exactly") {
    // Three members offset from the observations by 1, 2 and 3 sigma on every
    // element: O_Nd = 0.5, 2 and 4.5 with no rounding slack.
    const int n_h = 4;
    auto layout = plain_layout(n_h, 1);
    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Constant(n_h, 10.0);
    obs.error_std = Eigen::VectorXd::Constant(n_h, 2.0);

    Eigen::MatrixXd data(n_h + 1, 3);
    for (int j = 0; j < 3; ++j) {
        data.col(j).head(n_h) = obs.values + double(j + 1) * obs.error_std;
        data(n_h, j) = 123.0;
    }
    dsi::EnsembleMatrix ens(data, layout);

    const auto report = dsi::normalized_mismatch(ens, obs);
    REQUIRE(report.per_member.size() == 3);
    CHECK(report.per_member[0] == 0.5);
    CHECK(report.per_member[1] == 2.0);
    CHECK(report.per_member[2] == 4.5);
    CHECK(report.mean == doctest::Approx((0.5 + 2.0 + 4.5) / 3.0).epsilon(1e-15));

    // Sample standard deviation with the N - 1 divisor.
    const double mean = report.mean;
    const double var = ((0.5 - mean) * (0.5 - mean) + (2.0 - mean) * (2.0 - mean) +
                        (4.5 - mean) * (4.5 - mean)) /
                       2.0;
    CHECK(report.std == doctest::Approx(std::sqrt(var)).epsilon(1e-15));
}

TEST_CASE("mismatch mixes signs and per element scales") {
    auto layout = plain_layout(2, 0);
    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Zero(2);
    obs.error_std = Eigen::VectorXd(2);
    obs.error_std << 1.0, 10.0;

    Eigen::MatrixXd data(2, 2);
    data.col(0) << 3.0, -20.0; // 3 sigma and -2 sigma
    data.col(1) << 0.0, 0.0;
    dsi::EnsembleMatrix ens(data, layout);
    const auto report = dsi::normalized_mismatch(ens, obs);
    CHECK(report.per_member[0] == doctest::Approx((9.0 + 4.0) / 4.0).epsilon(1e-15));
    CHECK(report.per_member[1] == 0.0);
}

TEST_CASE("percentiles follow the linear order statistic convention") {
    auto layout = plain_layout(1, 0);

    Eigen::MatrixXd small(1, 3);
    small << 3.0, 1.0, 2.0;
    const Eigen::MatrixXd p50 =
        dsi::percentiles(dsi::EnsembleMatrix(small, layout), {0.5});
    CHECK(p50(0, 0) == 2.0);

    // 101 equally spaced values make every percentile land on a sample.
    Eigen::MatrixXd wide(1, 101);
    for (int j = 0; j <= 100; ++j)
        wide(0, j) = double(j);
    dsi::EnsembleMatrix ens(wide, layout);
    const Eigen::MatrixXd q = dsi::percentiles(ens, {0.1, 0.5, 0.9});
    CHECK(q(0, 0) == 10.0);
    CHECK(q(0, 1) == 50.0);
    CHECK(q(0, 2) == 90.0);

    // Interpolation between order statistics: h = (n-1) p = 0.25 on {1, 2}.
    Eigen::MatrixXd pair(1, 2);
    pair << 1.0, 2.0;
    const Eigen::MatrixXd q25 =
        dsi::percentiles(dsi::EnsembleMatrix(pair, layout), {0.25});
    CHECK(q25(0, 0) == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("percentile band orders its three levels") {
    auto engine = dsi::make_engine(777, dsi::RngUse::testbed_prior);
    Eigen::MatrixXd data = dsi::standard_normal_matrix(6, 500, engine);
    dsi::EnsembleMatrix ens(data, plain_layout(3, 3));

    const auto band = dsi::percentile_band(ens);
    REQUIRE(band.p10.size() == 6);
    for (Eigen::Index i = 0; i < 6; ++i) {
        CHECK(band.p10[i] <= band.p50[i]);
        CHECK(band.p50[i] <= band.p90[i]);
    }

    const Eigen::MatrixXd q = dsi::percentiles(ens, {0.1, 0.5, 0.9});
    CHECK((band.p10 - q.col(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((band.p50 - q.col(1)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((band.p90 - q.col(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant ensembles collapse the band") {
    Eigen::MatrixXd data = Eigen::MatrixXd::Constant(2, 10, 4.0);
    dsi::EnsembleMatrix ens(data, plain_layout(1, 1));
    const auto band = dsi::percentile_band(ens);
    CHECK(band.p10[0] == 4.0);
    CHECK(band.p50[0] == 4.0);
    CHECK(band.p90[0] == 4.0);

    // A reference exactly on the collapsed band is covered (inclusive bounds).
    CHECK(dsi::coverage(ens, Eigen::VectorXd::Constant(2, 4.0), 0.1, 0.9) == 1.0);
    CHECK(dsi::coverage(ens, Eigen::VectorXd::Constant(2, 4.1), 0.1, 0.9) == 0.0);
}

TEST_CASE("coverage counts elements inside the band") {
    auto layout = plain_layout(2, 2);
    Eigen::MatrixXd data(4, 101);
    for (int j = 0; j <= 100; ++j)
        for (int i = 0; i < 4; ++i)
            data(i, j) = double(j);
    dsi::EnsembleMatrix ens(data, layout);

    Eigen::VectorXd reference(4);
    reference << 50.0, 5.0, 95.0, 10.0; // inside, below, above, on the bound
    CHECK(dsi::coverage(ens, reference, 0.1, 0.9) == doctest::Approx(0.5));

    CHECK_THROWS_AS(dsi::coverage(ens, Eigen::VectorXd::Zero(3), 0.1, 0.9), dsi::DataError);
    CHECK_THROWS_AS(dsi::coverage(ens, reference, 0.9, 0.1), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::coverage(ens, reference, 0.0, 0.9), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::coverage(ens, reference, 0.1, 1.0), dsi::ConfigError);
}

TEST_CASE("coverage of a matched gaussian approaches the band width") {
    auto engine = dsi::make_engine(888, dsi::RngUse::testbed_prior);
    const int n = 400;
    Eigen::MatrixXd data = dsi::standard_normal_matrix(n, 2000, engine);
    dsi::EnsembleMatrix ens(data, plain_layout(n / 2, n / 2));
    const Eigen::VectorXd reference = dsi::standard_normal_vector(n, engine);
    // Reference drawn from the same distribution: expect about 80% inside.
    const double c = dsi::coverage(ens, reference, 0.1, 0.9);
    CHECK(c > 0.72);
    CHECK(c < 0.88);
}

TEST_CASE("probabilities outside the open unit interval are rejected") {
    Eigen::MatrixXd data = Eigen::MatrixXd::Constant(1, 5, 1.0);
    dsi::EnsembleMatrix ens(data, plain_layout(1, 0));
    CHECK_THROWS_AS(dsi::percentiles(ens, {0.0}), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::percentiles(ens, {1.0}), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::percentiles(ens, {-0.2}), dsi::ConfigError);
    CHECK_NOTHROW(dsi::percentiles(ens, {0.5}));
}

TEST_CASE("mismatch requires a history block and matching observations") {
    Eigen::MatrixXd data = Eigen::MatrixXd::Constant(2, 4, 1.0);
    dsi::EnsembleMatrix ens(data, plain_layout(0, 2));
    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Zero(0);
    obs.error_std = Eigen::VectorXd::Zero(0);
    CHECK_THROWS_AS(dsi::normalized_mismatch(ens, obs), dsi::DataError);

    dsi::EnsembleMatrix with_history(data, plain_layout(1, 1));
    dsi::Observations wrong;
    wrong.values = Eigen::VectorXd::Zero(2);
    wrong.error_std = Eigen::VectorXd::Constant(2, 1.0);
    CHECK_THROWS_AS(dsi::normalized_mismatch(with_history, wrong), dsi::DataError);
}
