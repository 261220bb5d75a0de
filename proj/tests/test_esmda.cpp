/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "dsi/esmda.hpp"
#include "dsi/errors.hpp"
#include "dsi/random.hpp"

namespace {

dsi::DataElement element(std::string id, double x, double y, double time, bool history,
                         dsi::DataKind kind = dsi::DataKind::other) {
    dsi::DataElement e;
    e.id = std::move(id);
    e.well_id = "W";
    e.x = x;
    e.y = y;
    e.time = time;
    e.kind = kind;
    e.is_history = history;
    e.noise_std = history ? 1.0 : 0.0;
    return e;
}

// One observed element plus one forecast element that is exactly 2 d_h + 5.
dsi::EnsembleMatrix linear_pair_ensemble(Eigen::Index members, std::uint64_t seed) {
    std::vector<dsi::DataElement> elems;
    elems.push_back(element("h", 0.0, 0.0, 30.0, true));
    elems.push_back(element("f", 0.0, 0.0, 360.0, false));
    auto layout = std::make_shared<dsi::DataLayout>(std::move(elems));

    auto engine = dsi::make_engine(seed, dsi::RngUse::testbed_prior);
    Eigen::MatrixXd data(2, members);
    for (Eigen::Index j = 0; j < members; ++j) {
        std::normal_distribution<double> normal(1.0, 2.0);
        data(0, j) = normal(engine);
        data(1, j) = 2.0 * data(0, j) + 5.0;
    }
    return {data, layout};
}

} // namespace

TEST_CASE("inflation schedule must sum to one in reciprocals") {
    CHECK_NOTHROW(dsi::MdaSchedule({1.0}));
    CHECK_NOTHROW(dsi::MdaSchedule({2.0, 2.0}));
    CHECK_NOTHROW(dsi::MdaSchedule({4.0, 4.0, 4.0, 4.0}));
    CHECK_NOTHROW(dsi::MdaSchedule({2.0, 4.0, 4.0}));
    CHECK_THROWS_AS(dsi::MdaSchedule({2.0, 3.0}), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::MdaSchedule({4.0, 4.0}), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::MdaSchedule({}), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::MdaSchedule({-1.0, 0.5}), dsi::ConfigError);
    CHECK_THROWS_AS(dsi::MdaSchedule({0.0}), dsi::ConfigError);

    const auto uniform = dsi::MdaSchedule::uniform(4);
    REQUIRE(uniform.iterations() == 4);
    for (double a : uniform.alphas())
        CHECK(a == 4.0);
    CHECK_THROWS_AS(dsi::MdaSchedule::uniform(0), dsi::ConfigError);
}

TEST_CASE("scalar gain matches the closed form") {
    Eigen::MatrixXd anomalies(1, 2);
    anomalies << 2.0, 0.0; // outer product 4, two members keep the rank cap at 1
    Eigen::VectorXd ce = Eigen::VectorXd::Ones(1);
    // K = 4 / (4 + 1) = 0.8.
    const Eigen::MatrixXd gain = dsi::kalman_gain(anomalies, anomalies, ce, 1.0, 1.0);
    REQUIRE(gain.rows() == 1);
    REQUIRE(gain.cols() == 1);
    CHECK(gain(0, 0) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("gain preserves exact linear relations between rows") {
    auto engine = dsi::make_engine(17, dsi::RngUse::testbed_prior);
    const Eigen::MatrixXd hist = dsi::standard_normal_matrix(3, 30, engine);
    Eigen::MatrixXd all(5, 30);
    all.topRows(3) = hist;
    all.row(3) = 2.0 * hist.row(0);
    all.row(4) = hist.row(1) - hist.row(2);
    const Eigen::VectorXd ce = Eigen::VectorXd::Constant(3, 0.5);

    const Eigen::MatrixXd gain = dsi::kalman_gain(all, hist, ce, 2.0, 1.0);
    CHECK((gain.row(3) - 2.0 * gain.row(0)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((gain.row(4) - (gain.row(1) - gain.row(2))).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("scalar assimilation reproduces the conjugate posterior") {
    // Prior N(1, 4), observation y = 3 with unit noise:
    // posterior N(1 + 0.8 (3 - 1), 0.8) = N(2.6, 0.8).
    const Eigen::Index n_e = 4000;
    const auto prior = linear_pair_ensemble(n_e, 101);

    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Constant(1, 3.0);
    obs.error_std = Eigen::VectorXd::Ones(1);

    dsi::EsmdaConfig config;
    config.schedule = dsi::MdaSchedule::uniform(4);
    config.energy = 1.0;
    config.seed = 7;
    const auto posterior = dsi::run_dsi_esmda(prior, obs, config);

    const Eigen::VectorXd mean = posterior.data().rowwise().mean();
    Eigen::VectorXd var(2);
    for (int r = 0; r < 2; ++r) {
        const auto dev = posterior.data().row(r).array() - mean[r];
        var[r] = dev.square().sum() / double(n_e - 1);
    }

    CHECK(mean[0] == doctest::Approx(2.6).epsilon(0.03));
    CHECK(var[0] == doctest::Approx(0.8).epsilon(0.10));
    // The forecast element rides along the exact relation 2 d_h + 5.
    CHECK(mean[1] == doctest::Approx(10.2).epsilon(0.03));
    CHECK(var[1] == doctest::Approx(3.2).epsilon(0.10));
    for (Eigen::Index j = 0; j < n_e; ++j) {
        CHECK(posterior.data()(1, j) ==
              doctest::Approx(2.0 * posterior.data()(0, j) + 5.0).epsilon(1e-9));
    }
}

TEST_CASE("single and multiple assimilation steps agree in distribution") {
    const Eigen::Index n_e = 4000;
    const auto prior = linear_pair_ensemble(n_e, 202);

    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Constant(1, 3.0);
    obs.error_std = Eigen::VectorXd::Ones(1);

    dsi::EsmdaConfig one;
    one.schedule = dsi::MdaSchedule::uniform(1);
    one.energy = 1.0;
    one.seed = 7;
    dsi::EsmdaConfig four;
    four.schedule = dsi::MdaSchedule::uniform(4);
    four.energy = 1.0;
    four.seed = 7;

    const auto post1 = dsi::run_dsi_esmda(prior, obs, one);
    const auto post4 = dsi::run_dsi_esmda(prior, obs, four);

    const double m1 = post1.data().row(0).mean();
    const double m4 = post4.data().row(0).mean();
    CHECK(m1 == doctest::Approx(m4).epsilon(0.05));
    const auto var_of = [&](const dsi::EnsembleMatrix& e) {
        const auto dev = e.data().row(0).array() - e.data().row(0).mean();
        return dev.square().sum() / double(n_e - 1);
    };
    CHECK(var_of(post1) == doctest::Approx(var_of(post4)).epsilon(0.12));
}

TEST_CASE("threaded and serial updates are bit identical") {
    const auto prior = linear_pair_ensemble(64, 303);
    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Constant(1, 3.0);
    obs.error_std = Eigen::VectorXd::Ones(1);

    dsi::EsmdaConfig serial;
    serial.seed = 99;
    dsi::EsmdaConfig threaded = serial;
    threaded.threads = 4;

    const auto a = dsi::run_dsi_esmda(prior, obs, serial);
    const auto b = dsi::run_dsi_esmda(prior, obs, threaded);
    CHECK(a.data() == b.data());
}

TEST_CASE("same seed replays the same posterior, other seeds differ") {
    const auto prior = linear_pair_ensemble(64, 304);
    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Constant(1, 3.0);
    obs.error_std = Eigen::VectorXd::Ones(1);

    dsi::EsmdaConfig config;
    config.seed = 42;
    const auto a = dsi::run_dsi_esmda(prior, obs, config);
    const auto b = dsi::run_dsi_esmda(prior, obs, config);
    CHECK(a.data() == b.data());

    config.seed = 43;
    const auto c = dsi::run_dsi_esmda(prior, obs, config);
    CHECK(a.data() != c.data());
}

TEST_CASE("negative truncation touches only the configured kind, after the last step") {
    std::vector<dsi::DataElement> elems;
    elems.push_back(element("h", 0.0, 0.0, 30.0, true));
    elems.push_back(element("water", 0.0, 0.0, 360.0, false, dsi::DataKind::water_rate));
    elems.push_back(element("oil", 0.0, 0.0, 360.0, false, dsi::DataKind::oil_rate));
    auto layout = std::make_shared<dsi::DataLayout>(std::move(elems));

    auto engine = dsi::make_engine(404, dsi::RngUse::testbed_prior);
    Eigen::MatrixXd data = dsi::standard_normal_matrix(3, 200, engine);
    // Center the two forecast kinds near zero so the update drives members negative.
    data.row(1) = 0.5 * data.row(0) + 0.1 * data.row(1);
    data.row(2) = 0.5 * data.row(0) + 0.1 * data.row(2);
    dsi::EnsembleMatrix prior(data, layout);

    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Constant(1, -3.0);
    obs.error_std = Eigen::VectorXd::Constant(1, 0.5);

    dsi::EsmdaConfig plain;
    plain.seed = 5;
    plain.truncate_negative = {};
    dsi::EsmdaConfig truncated = plain;
    truncated.truncate_negative = {dsi::DataKind::water_rate};

    const auto raw = dsi::run_dsi_esmda(prior, obs, plain);
    const auto cut = dsi::run_dsi_esmda(prior, obs, truncated);

    // Truncation is a pure postprocess: every other row is untouched, so the
    // negative values never influenced the update itself.
    CHECK(raw.data().row(0) == cut.data().row(0));
    CHECK(raw.data().row(2) == cut.data().row(2));
    CHECK(raw.data().row(1).minCoeff() < 0.0);
    CHECK(cut.data().row(1).minCoeff() == 0.0);
    const Eigen::ArrayXXd expected = raw.data().row(1).array().max(0.0);
    CHECK((cut.data().row(1).array() == expected).all());
}

TEST_CASE("fully tapered rows keep their prior values") {
    std::vector<dsi::DataElement> elems;
    elems.push_back(element("h", 0.0, 0.0, 30.0, true));
    elems.push_back(element("near", 100.0, 0.0, 60.0, false));
    elems.push_back(element("far", 50000.0, 50000.0, 30.0, false));
    auto layout = std::make_shared<dsi::DataLayout>(std::move(elems));

    auto engine = dsi::make_engine(505, dsi::RngUse::testbed_prior);
    const Eigen::MatrixXd data = dsi::standard_normal_matrix(3, 100, engine);
    dsi::EnsembleMatrix prior(data, layout);

    dsi::Observations obs;
    obs.values = Eigen::VectorXd::Constant(1, 2.0);
    obs.error_std = Eigen::VectorXd::Constant(1, 0.5);

    dsi::EsmdaConfig config;
    config.seed = 11;
    config.localization.enabled = true;
    config.localization.length_x = 1000.0;
    config.localization.length_y = 1000.0;
    config.localization.length_t = 1000.0;

    const auto posterior = dsi::run_dsi_esmda(prior, obs, config);
    // The far element sits beyond twice every critical length: zero taper.
    CHECK(posterior.data().row(2) == prior.data().row(2));
    // The observed element itself moves.
    CHECK(posterior.data().row(0) != prior.data().row(0));
}

TEST_CASE("esmda configuration is validated") {
    dsi::EsmdaConfig config;
    config.energy = 0.0;
    CHECK_THROWS_AS(config.validate(), dsi::ConfigError);
    config = {};
    config.energy = 1.5;
    CHECK_THROWS_AS(config.validate(), dsi::ConfigError);
    config = {};
    config.threads = 0;
    CHECK_THROWS_AS(config.validate(), dsi::ConfigError);
    config = {};
    config.localization.enabled = true; // lengths default to zero
    CHECK_THROWS_AS(config.validate(), dsi::ConfigError);
    CHECK_NOTHROW(dsi::EsmdaConfig{}.validate());
}
