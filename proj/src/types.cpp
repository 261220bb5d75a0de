/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/types.hpp"

#include <cmath>
#include <unordered_set>

namespace dsi {

DataKind data_kind_from_string(std::string_view name) {
    if (name == "oil_rate")
        return DataKind::oil_rate;
    if (name == "water_rate")
        return DataKind::water_rate;
    if (name == "injection_rate")
        return DataKind::injection_rate;
    if (name == "pressure")
        return DataKind::pressure;
    if (name == "other")
        return DataKind::other;
    throw DataError("unknown data kind '" + std::string(name) + "'");
}

std::string_view to_string(DataKind kind) {
    switch (kind) {
    case DataKind::oil_rate:
        return "oil_rate";
    case DataKind::water_rate:
        return "water_rate";
    case DataKind::injection_rate:
        return "injection_rate";
    case DataKind::pressure:
        return "pressure";
    case DataKind::other:
        return "other";
    }
    return "other";
}

DataLayout::DataLayout(std::vector<DataElement> elements) : elements_(std::move(elements)) {
    if (elements_.empty())
        throw DataError("layout has no elements");

    std::unordered_set<std::string> seen;
    seen.reserve(elements_.size());
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        const DataElement& e = elements_[i];
        if (!std::isfinite(e.x) || !std::isfinite(e.y))
            throw DataError("element '" + e.id + "': non-finite coordinates");
        if (!std::isfinite(e.time) || e.time < 0.0)
            throw DataError("element '" + e.id + "': negative or non-finite time");
        if (e.is_history) {
            if (!(e.noise_std > 0.0) || !std::isfinite(e.noise_std))
                throw DataError("element '" + e.id + "': history element needs noise_std > 0");
            history_.push_back(static_cast<Eigen::Index>(i));
        } else {
            forecast_.push_back(static_cast<Eigen::Index>(i));
        }
        if (!e.id.empty() && !seen.insert(e.id).second)
            throw DataError("duplicate element id '" + e.id + "'");
    }
}

Eigen::VectorXd DataLayout::history_noise_std() const {
    Eigen::VectorXd out(history_size());
    for (Eigen::Index i = 0; i < history_size(); ++i)
        out[i] = elements_[static_cast<std::size_t>(history_[static_cast<std::size_t>(i)])].noise_std;
    return out;
}

EnsembleMatrix::EnsembleMatrix(Eigen::MatrixXd data, std::shared_ptr<const DataLayout> layout)
    : data_(std::move(data)), layout_(std::move(layout)) {
    if (!layout_)
        throw DataError("ensemble has no layout");
    if (data_.cols() < 2)
        throw DataError("degenerate ensemble: need at least 2 members, got " +
                        std::to_string(data_.cols()));
    if (data_.rows() != layout_->size())
        throw DataError("ensemble has " + std::to_string(data_.rows()) + " rows but layout has " +
                        std::to_string(layout_->size()) + " elements");
    if (!data_.allFinite())
        throw DataError("ensemble contains non-finite values");
}

Eigen::MatrixXd EnsembleMatrix::history_rows() const {
    return data_(layout_->history_indices(), Eigen::all);
}

void Observations::validate(const DataLayout& layout) const {
    if (values.size() != layout.history_size())
        throw DataError("observations have " + std::to_string(values.size()) +
                        " values but layout has " + std::to_string(layout.history_size()) +
                        " history elements");
    if (error_std.size() != values.size())
        throw DataError("observation error_std length mismatch");
    if (!(error_std.array() > 0.0).all() || !error_std.allFinite())
        throw DataError("observation error_std must be strictly positive");
    if (!values.allFinite())
        throw DataError("observations contain non-finite values");
}

} // namespace dsi
