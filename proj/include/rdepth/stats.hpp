#pragma once

#include <array>
#include <limits>
#include <span>
#include <string_view>

namespace rdepth {

/// Sentinel for a feature that could not be computed (too few voxels,
/// empty co-occurrence). Written as an empty CSV cell.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct FirstOrderStats {
    double mean = 0, median = 0, std = 0, skewness = 0, kurtosis = 0;

    static constexpr std::array<std::string_view, 5> names{"mean", "median", "std", "skewness", "kurtosis"};
    std::array<double, 5> values() const { return {mean, median, std, skewness, kurtosis}; }
    static FirstOrderStats missing() { return {kMissing, kMissing, kMissing, kMissing, kMissing}; }
};

/// Population moments: std = sqrt(m2), skewness = m3 / m2^1.5, kurtosis =
/// m4 / m2^2 (Pearson, not excess). A constant sample has std, skewness and
/// kurtosis all zero. Throws std::invalid_argument on empty input.
FirstOrderStats first_order(std::span<const double> values);

}  // namespace rdepth
