#include "rdepth/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rdepth {

FirstOrderStats first_order(std::span<const double> values)
{
    if (values.empty())
        throw std::invalid_argument("first_order: empty sample");

    const double n = static_cast<double>(values.size());
    // Sorting first makes every statistic independent of input order, down
    // to the last bit of the floating-point sums.
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    if (sorted.front() == sorted.back())
        return {sorted.front(), sorted.front(), 0.0, 0.0, 0.0};

    double sum = 0;
    for (double v : sorted)
        sum += v;
    const double mean = sum / n;

    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : sorted) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    const std::size_t k = sorted.size();
    const double median = k % 2 == 1 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);

    FirstOrderStats s;
    s.mean = mean;
    s.median = median;
    s.std = std::sqrt(m2);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

}  // namespace rdepth
