#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace rdepth {

/// Symmetric B×B co-occurrence counts. Tracks which cells are nonzero so
/// that reset and statistics cost scale with the occupied cells, not B².
class CoocMatrix {
public:
    explicit CoocMatrix(int bins = 64);

    int bins() const { return bins_; }
    double total() const { return total_; }
    bool empty() const { return total_ == 0.0; }

    double count(int i, int j) const { return counts_[static_cast<std::size_t>(i * bins_ + j)]; }
    /// Normalized probability of cell (i, j); zero when empty.
    double probability(int i, int j) const { return empty() ? 0.0 : count(i, j) / total_; }

    /// Adds one (a, b) and one (b, a) observation.
    void add_pair(int a, int b);
    /// Adds `weight` to a single cell (no mirroring). For building test and
    /// synthetic matrices.
    void add_cell(int i, int j, double weight);
    void reset();

    /// Flat indices (i * bins + j) of cells with nonzero count, in insertion order.
    const std::vector<std::uint32_t>& occupied() const { return occupied_; }

private:
    int bins_;
    double total_ = 0.0;
    std::vector<double> counts_;
    std::vector<std::uint32_t> occupied_;
};

/// Haralick's statistics f1..f13 of a normalized co-occurrence matrix.
/// Gray levels are numbered 1..B. Entropy-type terms use log(p + 1e-12)
/// (natural log) and the three entropies are clamped at zero.
struct HaralickVector {
    enum Stat {
        energy,
        contrast,
        correlation,
        variance,
        inverse_difference_moment,
        sum_average,
        sum_variance,
        sum_entropy,
        entropy,
        difference_variance,
        difference_entropy,
        info_correlation_1,
        info_correlation_2,
        count
    };

    static constexpr std::array<std::string_view, count> names{
        "energy",          "contrast",           "correlation",        "variance",
        "inverse_difference_moment", "sum_average", "sum_variance",    "sum_entropy",
        "entropy",         "difference_variance", "difference_entropy", "info_correlation_1",
        "info_correlation_2"};

    std::array<double, count> values{};

    double operator[](int s) const { return values[static_cast<std::size_t>(s)]; }
    bool missing() const { return values[0] != values[0]; }
    static HaralickVector make_missing();
};

inline constexpr double kLogEpsilon = 1e-12;

/// Returns HaralickVector::make_missing() for an empty matrix.
///
/// Conventions for degenerate matrices: correlation is 1 when either
/// marginal has zero variance, info_correlation_1 is 0 when both marginal
/// entropies are zero. sum_variance is centered on sum_average.
/// difference_variance is the variance of the |i - j| histogram.
HaralickVector haralick(const CoocMatrix& m);

}  // namespace rdepth
