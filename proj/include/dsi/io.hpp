/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>

#include "dsi/types.hpp"

namespace dsi {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Layout CSV: header `id,well,x,y,time,kind,is_history,noise_std`, one
/// element per row. Parse failures carry file and line number.
std::shared_ptr<const DataLayout> read_layout_csv(const std::string& path);
void write_layout_csv(const std::string& path, const DataLayout& layout);

/// Ensemble CSV: header `id,m0001,m0002,...`; one row per element, in layout
/// order and with matching ids.
EnsembleMatrix read_ensemble_csv(const std::string& path,
                                 std::shared_ptr<const DataLayout> layout);
void write_ensemble_csv(const std::string& path, const EnsembleMatrix& ens);

/// Observations CSV: header `id,value,noise_std`. Every history element must
/// be observed exactly once; an empty noise_std falls back to the layout's.
Observations read_observations_csv(const std::string& path, const DataLayout& layout);
void write_observations_csv(const std::string& path, const DataLayout& layout,
                            const Observations& obs);

/// Per-element value CSV: header `id,<value_header>`, rows in layout order.
Eigen::VectorXd read_vector_csv(const std::string& path, const DataLayout& layout);
void write_vector_csv(const std::string& path, const DataLayout& layout,
                      const Eigen::VectorXd& values, const std::string& value_header);

/// Flat `key=value` configuration file. `#` lines and blank lines are
/// skipped; duplicate keys are rejected.
std::map<std::string, std::string> read_config_file(const std::string& path);

} // namespace dsi
