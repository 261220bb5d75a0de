/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>

#include "dsi/types.hpp"

namespace dsi {

/// Critical lengths of the taper. The spatial distance between two data
/// points is measured between their well heads, rotated by `angle`
/// (counterclockwise, radians) into the anisotropy axes x', y'; the temporal
/// distance is scaled by `length_t`.
struct LocalizationSpec {
    double length_x = 0.0; ///< critical length along x' [m]
    double length_y = 0.0; ///< critical length along y' [m]
    double length_t = 0.0; ///< critical length in time [days]
    double angle = 0.0;    ///< rotation of the anisotropy axes [rad]
    bool enabled = false;

    void validate() const;
};

/// Taper with the shape of the Kalman gain: rows span all data elements,
/// columns span the history (observed) elements. Entries lie in [0, 1].
struct LocalizationMatrix {
    Eigen::MatrixXd values;
};

/// Fifth-order compactly supported correlation function of Gaspari and Cohn
/// (1999). Equals 1 at ratio 0, decays to about 0.21 at ratio 1 and vanishes
/// for ratios >= 2. Throws on negative ratios.
double gaspari_cohn(double ratio);

/// Composite distance-to-length ratio between two data elements:
/// sqrt((dx'/Lx')^2 + (dy'/Ly')^2 + (dt/T)^2) with (dx', dy') the rotated
/// well-head displacement.
double composite_ratio(const DataElement& a, const DataElement& b, const LocalizationSpec& spec);

/// R[n, i] = gaspari_cohn(composite_ratio(element n, history element i)).
/// A disabled spec yields the all-ones matrix (no tapering).
LocalizationMatrix build_localization(const DataLayout& layout, const LocalizationSpec& spec);

} // namespace dsi
