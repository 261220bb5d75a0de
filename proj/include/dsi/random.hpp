/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace dsi {

/// Stream labels used when deriving independent engines from the one run seed.
enum class RngUse : std::uint64_t {
    esmda_perturbation = 1,
    rml_sample = 2,
    anamorphosis = 3,
    testbed_prior = 4,
    testbed_noise = 5,
    testbed_reference = 6,
};

namespace detail {
// splitmix64 finalizer; decorrelates consecutive counters.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// Engine for the (stream, index) substream of `seed`. Counter-derived so the
/// same tuple always yields the same draws, independent of thread scheduling.
inline std::mt19937_64 make_engine(std::uint64_t seed, RngUse stream, std::uint64_t index = 0) {
    std::uint64_t s = detail::mix64(seed);
    s = detail::mix64(s ^ static_cast<std::uint64_t>(stream));
    s = detail::mix64(s ^ index);
    return std::mt19937_64(s);
}

inline Eigen::VectorXd standard_normal_vector(Eigen::Index n, std::mt19937_64& engine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = normal(engine);
    return v;
}

inline Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                              std::mt19937_64& engine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = normal(engine);
    return m;
}

} // namespace dsi
