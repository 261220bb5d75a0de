/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace dsi {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad option values, missing settings). CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent input data (parse failures, shape mismatches). CLI exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (degenerate matrices, non-convergence). CLI exit code 4.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace dsi
