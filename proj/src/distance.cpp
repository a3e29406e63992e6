#include <cmath>
#include <limits>
#include <vector>

#include "rdepth/bands.hpp"

namespace rdepth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas f[p] + (h (q - p))^2 over the finite sites of
// f; writes min_p into out[q]. Scratch buffers are reused across lines.
void envelope_1d(const std::vector<double>& f, double h, std::vector<double>& out, std::vector<std::size_t>& site,
                 std::vector<double>& boundary)
{
    const std::size_t n = f.size();
    const double h2 = h * h;
    site.clear();
    boundary.clear();

    for (std::size_t p = 0; p < n; ++p) {
        if (f[p] == kInf)
            continue;
        const double fp = f[p] + h2 * static_cast<double>(p) * static_cast<double>(p);
        double cross = -kInf;
        while (!site.empty()) {
            const std::size_t v = site.back();
            const double fv = f[v] + h2 * static_cast<double>(v) * static_cast<double>(v);
            cross = (fp - fv) / (2.0 * h2 * static_cast<double>(p - v));
            if (cross <= boundary.back()) {
                site.pop_back();
                boundary.pop_back();
                cross = -kInf;
            } else {
                break;
            }
        }
        site.push_back(p);
        boundary.push_back(cross);
    }

    if (site.empty()) {
        std::fill(out.begin(), out.end(), kInf);
        return;
    }
    std::size_t k = 0;
    for (std::size_t q = 0; q < n; ++q) {
        while (k + 1 < site.size() && boundary[k + 1] < static_cast<double>(q))
            ++k;
        // Neighbouring candidates can tie; take the smaller value explicitly.
        double best = kInf;
        for (std::size_t c = k; c < site.size() && c <= k + 1; ++c) {
            const double dq = static_cast<double>(q) - static_cast<double>(site[c]);
            best = std::min(best, f[site[c]] + h2 * dq * dq);
        }
        out[q] = best;
    }
}

}  // namespace

Volume distance_transform(const Mask& mask)
{
    if (mask.empty())
        throw std::invalid_argument("distance_transform: mask has no foreground voxels");

    const Grid& grid = mask.grid();
    const auto& d = grid.dims();
    std::vector<double> sq(grid.size());
    for (std::size_t i = 0; i < sq.size(); ++i)
        sq[i] = mask[i] ? 0.0 : kInf;

    std::vector<double> line, out;
    std::vector<std::size_t> site;
    std::vector<double> boundary;

    for (int axis = 0; axis < 3; ++axis) {
        const std::size_t n = d[axis];
        const std::size_t stride = axis == 0 ? 1 : axis == 1 ? d.nx : d.nx * d.ny;
        const double h = grid.spacing()[axis];
        line.resize(n);
        out.resize(n);
        for (std::size_t start = 0; start < grid.size(); ++start) {
            if ((start / stride) % n != 0)
                continue;
            for (std::size_t k = 0; k < n; ++k)
                line[k] = sq[start + k * stride];
            envelope_1d(line, h, out, site, boundary);
            for (std::size_t k = 0; k < n; ++k)
                sq[start + k * stride] = out[k];
        }
    }

    Volume dist(grid);
    for (std::size_t i = 0; i < sq.size(); ++i)
        dist[i] = std::sqrt(sq[i]);
    return dist;
}

}  // namespace rdepth
