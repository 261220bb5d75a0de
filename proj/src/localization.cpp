/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/localization.hpp"

#include <cmath>
#include <string>

namespace dsi {

void LocalizationSpec::validate() const {
    if (!enabled)
        return;
    if (!(length_x > 0.0) || !(length_y > 0.0) || !(length_t > 0.0))
        throw ConfigError("localization critical lengths must be positive");
    if (!std::isfinite(angle))
        throw ConfigError("localization angle must be finite");
}

double gaspari_cohn(double ratio) {
    if (ratio < 0.0 || !std::isfinite(ratio))
        throw ConfigError("taper ratio must be non-negative, got " + std::to_string(ratio));
    const double r = ratio;
    if (r <= 1.0) {
        return -0.25 * r * r * r * r * r + 0.5 * r * r * r * r + 0.625 * r * r * r -
               (5.0 / 3.0) * r * r + 1.0;
    }
    if (r < 2.0) {
        // The outer branch rounds to tiny negatives near r = 2; clamp to keep
        // the taper inside [0, 1].
        const double v = (1.0 / 12.0) * r * r * r * r * r - 0.5 * r * r * r * r +
                         0.625 * r * r * r + (5.0 / 3.0) * r * r - 5.0 * r + 4.0 -
                         (2.0 / 3.0) / r;
        return std::max(0.0, v);
    }
    return 0.0;
}

double composite_ratio(const DataElement& a, const DataElement& b, const LocalizationSpec& spec) {
    spec.validate();
    if (!spec.enabled)
        throw ConfigError("composite ratio requested with localization disabled");

    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    // Project onto axes rotated counterclockwise by `angle`: the x' component
    // of the displacement is its dot product with (cos, sin).
    const double c = std::cos(spec.angle);
    const double s = std::sin(spec.angle);
    const double dx_rot = c * dx + s * dy;
    const double dy_rot = -s * dx + c * dy;
    const double dt = a.time - b.time;

    const double u = dx_rot / spec.length_x;
    const double v = dy_rot / spec.length_y;
    const double w = dt / spec.length_t;
    return std::sqrt(u * u + v * v + w * w);
}

LocalizationMatrix build_localization(const DataLayout& layout, const LocalizationSpec& spec) {
    spec.validate();
    const Eigen::Index n_all = layout.size();
    const Eigen::Index n_hist = layout.history_size();
    if (n_hist == 0)
        throw DataError("layout has no history elements");

    LocalizationMatrix loc;
    if (!spec.enabled) {
        loc.values = Eigen::MatrixXd::Ones(n_all, n_hist);
        return loc;
    }

    loc.values.resize(n_all, n_hist);
    const auto& hist = layout.history_indices();
    for (Eigen::Index n = 0; n < n_all; ++n) {
        const DataElement& row_elem = layout[n];
        for (Eigen::Index i = 0; i < n_hist; ++i) {
            const DataElement& col_elem = layout[hist[static_cast<std::size_t>(i)]];
            loc.values(n, i) = gaspari_cohn(composite_ratio(row_elem, col_elem, spec));
        }
    }
    return loc;
}

} // namespace dsi
