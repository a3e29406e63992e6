#include "rdepth/haralick.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdepth/stats.hpp"

namespace rdepth {

CoocMatrix::CoocMatrix(int bins) : bins_(bins)
{
    if (bins < 2)
        throw std::invalid_argument("co-occurrence matrix needs at least two bins");
    counts_.assign(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0.0);
}

void CoocMatrix::add_cell(int i, int j, double weight)
{
    if (i < 0 || j < 0 || i >= bins_ || j >= bins_)
        throw std::out_of_range("co-occurrence level out of range");
    if (weight == 0.0)
        return;
    const auto k = static_cast<std::uint32_t>(i * bins_ + j);
    if (counts_[k] == 0.0)
        occupied_.push_back(k);
    counts_[k] += weight;
    total_ += weight;
}

void CoocMatrix::add_pair(int a, int b)
{
    add_cell(a, b, 1.0);
    add_cell(b, a, 1.0);
}

void CoocMatrix::reset()
{
    for (auto k : occupied_)
        counts_[k] = 0.0;
    occupied_.clear();
    total_ = 0.0;
}

HaralickVector HaralickVector::make_missing()
{
    HaralickVector h;
    h.values.fill(kMissing);
    return h;
}

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log(p + kLogEpsilon) : 0.0; }

}  // namespace

HaralickVector haralick(const CoocMatrix& m)
{
    if (m.empty())
        return HaralickVector::make_missing();

    const int B = m.bins();
    // Statistics depend only on the matrix contents, not on insertion order.
    std::vector<std::uint32_t> cells = m.occupied();
    std::sort(cells.begin(), cells.end());

    struct Cell {
        int i, j;  // 1-based gray levels
        double p;
    };
    std::vector<Cell> nz;
    nz.reserve(cells.size());
    for (auto k : cells) {
        const int i = static_cast<int>(k) / B;
        const int j = static_cast<int>(k) % B;
        nz.push_back({i + 1, j + 1, m.count(i, j) / m.total()});
    }

    std::vector<double> px(B + 1, 0.0), py(B + 1, 0.0);
    std::vector<double> psum(2 * B + 1, 0.0), pdiff(B, 0.0);
    for (const auto& c : nz) {
        px[c.i] += c.p;
        py[c.j] += c.p;
        psum[c.i + c.j] += c.p;
        pdiff[std::abs(c.i - c.j)] += c.p;
    }

    double mux = 0, muy = 0;
    for (int i = 1; i <= B; ++i) {
        mux += i * px[i];
        muy += i * py[i];
    }
    double varx = 0, vary = 0, hx = 0, hy = 0;
    for (int i = 1; i <= B; ++i) {
        varx += (i - mux) * (i - mux) * px[i];
        vary += (i - muy) * (i - muy) * py[i];
        hx -= plogp(px[i]);
        hy -= plogp(py[i]);
    }

    double energy = 0, contrast = 0, cov = 0, idm = 0, hxy = 0, hxy1 = 0;
    for (const auto& c : nz) {
        const double d = c.i - c.j;
        energy += c.p * c.p;
        contrast += d * d * c.p;
        cov += (c.i - mux) * (c.j - muy) * c.p;
        idm += c.p / (1.0 + d * d);
        hxy -= plogp(c.p);
        hxy1 -= c.p * std::log(px[c.i] * py[c.j] + kLogEpsilon);
    }

    double hxy2 = 0;
    for (int i = 1; i <= B; ++i) {
        if (px[i] == 0.0)
            continue;
        for (int j = 1; j <= B; ++j)
            hxy2 -= plogp(px[i] * py[j]);
    }

    double sum_avg = 0, sum_ent = 0;
    for (int k = 2; k <= 2 * B; ++k) {
        sum_avg += k * psum[k];
        sum_ent -= plogp(psum[k]);
    }
    double sum_var = 0;
    for (int k = 2; k <= 2 * B; ++k)
        sum_var += (k - sum_avg) * (k - sum_avg) * psum[k];

    double diff_mean = 0, diff_ent = 0;
    for (int k = 0; k < B; ++k) {
        diff_mean += k * pdiff[k];
        diff_ent -= plogp(pdiff[k]);
    }
    double diff_var = 0;
    for (int k = 0; k < B; ++k)
        diff_var += (k - diff_mean) * (k - diff_mean) * pdiff[k];

    const double sigma = std::sqrt(varx) * std::sqrt(vary);
    const double hmax = std::max(hx, hy);

    HaralickVector h;
    h.values[HaralickVector::energy] = energy;
    h.values[HaralickVector::contrast] = contrast;
    h.values[HaralickVector::correlation] = sigma > 0.0 ? cov / sigma : 1.0;
    h.values[HaralickVector::variance] = varx;
    h.values[HaralickVector::inverse_difference_moment] = idm;
    h.values[HaralickVector::sum_average] = sum_avg;
    h.values[HaralickVector::sum_variance] = sum_var;
    h.values[HaralickVector::sum_entropy] = std::max(0.0, sum_ent);
    h.values[HaralickVector::entropy] = std::max(0.0, hxy);
    h.values[HaralickVector::difference_variance] = diff_var;
    h.values[HaralickVector::difference_entropy] = std::max(0.0, diff_ent);
    h.values[HaralickVector::info_correlation_1] = hmax > 0.0 ? (hxy - hxy1) / hmax : 0.0;
    h.values[HaralickVector::info_correlation_2] = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - hxy))));
    return h;
}

}  // namespace rdepth
