/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dsi/errors.hpp"

namespace dsi {

enum class DataKind {
    oil_rate,
    water_rate,
    injection_rate,
    pressure,
    other,
};

DataKind data_kind_from_string(std::string_view name);
std::string_view to_string(DataKind kind);

/// One entry of the predicted-data vector: a quantity at a well and a time.
struct DataElement {
    std::string id;      ///< unique element id used by the file formats
    std::string well_id; ///< well the datum belongs to
    double x = 0.0;      ///< well head easting [m]
    double y = 0.0;      ///< well head northing [m]
    double time = 0.0;   ///< [days]
    DataKind kind = DataKind::other;
    bool is_history = false;
    double noise_std = 0.0; ///< observation-error standard deviation (>0 for history)
};

/// Ordered description of every element of the predicted-data vector.
///
/// History elements (is_history) form the observable subset; the remainder is
/// the forecast. The two subsets need not be contiguous.
class DataLayout {
public:
    explicit DataLayout(std::vector<DataElement> elements);

    Eigen::Index size() const { return static_cast<Eigen::Index>(elements_.size()); }
    Eigen::Index history_size() const { return static_cast<Eigen::Index>(history_.size()); }
    Eigen::Index forecast_size() const { return size() - history_size(); }

    const DataElement& operator[](Eigen::Index i) const { return elements_[static_cast<std::size_t>(i)]; }
    const std::vector<DataElement>& elements() const { return elements_; }

    /// Positions of history elements within the full vector, in layout order.
    const std::vector<Eigen::Index>& history_indices() const { return history_; }
    const std::vector<Eigen::Index>& forecast_indices() const { return forecast_; }

    /// Observation-error standard deviations of the history elements.
    Eigen::VectorXd history_noise_std() const;

private:
    std::vector<DataElement> elements_;
    std::vector<Eigen::Index> history_;
    std::vector<Eigen::Index> forecast_;
};

/// Prior or posterior ensemble of predicted-data vectors, one member per column.
class EnsembleMatrix {
public:
    EnsembleMatrix(Eigen::MatrixXd data, std::shared_ptr<const DataLayout> layout);

    const Eigen::MatrixXd& data() const { return data_; }
    const DataLayout& layout() const { return *layout_; }
    const std::shared_ptr<const DataLayout>& layout_ptr() const { return layout_; }

    Eigen::Index size() const { return data_.rows(); }
    Eigen::Index members() const { return data_.cols(); }

    /// The history-element rows, N_dh x N_e.
    Eigen::MatrixXd history_rows() const;

private:
    Eigen::MatrixXd data_;
    std::shared_ptr<const DataLayout> layout_;
};

/// Observed history with independent errors: diagonal Ce = diag(error_std^2).
struct Observations {
    Eigen::VectorXd values;    ///< one per history element, layout order
    Eigen::VectorXd error_std; ///< strictly positive, same order

    /// Diagonal of the total data-error covariance.
    Eigen::VectorXd ce_diag() const { return error_std.cwiseProduct(error_std); }

    /// Checks lengths and positivity against a layout; throws DataError.
    void validate(const DataLayout& layout) const;
};

} // namespace dsi
