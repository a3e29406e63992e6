#include "rdepth/volume.hpp"

#include <algorithm>
#include <cmath>

namespace rdepth {

Grid::Grid(Dims dims, Spacing spacing) : dims_(dims), spacing_(spacing)
{
    if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0)
        throw std::invalid_argument("grid dimensions must be positive");
    for (int a = 0; a < 3; ++a) {
        const double s = spacing[a];
        if (!std::isfinite(s) || s <= 0.0)
            throw std::invalid_argument("grid spacing must be finite and positive");
    }
}

void require_same_grid(const Grid& a, const Grid& b, const std::string& what)
{
    if (!(a == b))
        throw std::invalid_argument(what + ": grid dimensions or spacing differ");
}

Volume::Volume(Grid grid, double fill) : grid_(grid), data_(grid.size(), fill) {}

Volume::Volume(Grid grid, std::vector<double> data) : grid_(grid), data_(std::move(data))
{
    if (data_.size() != grid_.size())
        throw std::invalid_argument("volume data length does not match dimensions");
}

Mask::Mask(Grid grid, bool fill) : grid_(grid), data_(grid.size(), fill ? 1 : 0) {}

Mask::Mask(Grid grid, std::vector<std::uint8_t> data) : grid_(grid), data_(std::move(data))
{
    if (data_.size() != grid_.size())
        throw std::invalid_argument("mask data length does not match dimensions");
}

std::size_t Mask::count() const
{
    return static_cast<std::size_t>(
        std::count_if(data_.begin(), data_.end(), [](std::uint8_t v) { return v != 0; }));
}

Mask mask_union(const Mask& a, const Mask& b)
{
    require_same_grid(a.grid(), b.grid(), "mask union");
    Mask out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i)
        out.set(i, a[i] || b[i]);
    return out;
}

void RoiSet::validate() const
{
    if (!(brain.grid() == tumor.grid()) || !(brain.grid() == peri.grid()))
        throw DataError("ROI masks do not share dimensions and spacing");
    for (std::size_t i = 0; i < brain.size(); ++i) {
        if (tumor[i] && !brain[i])
            throw DataError("tumor mask extends outside the brain mask");
        if (peri[i] && !brain[i])
            throw DataError("peri-tumoral mask extends outside the brain mask");
        if (tumor[i] && peri[i])
            throw DataError("tumor and peri-tumoral masks overlap");
    }
}

DeformationField::DeformationField(Grid grid) : grid_(grid), data_(grid.size(), Vec3{0, 0, 0}) {}

DeformationField::DeformationField(Grid grid, std::vector<Vec3> data)
    : grid_(grid), data_(std::move(data))
{
    if (data_.size() != grid_.size())
        throw std::invalid_argument("deformation field length does not match dimensions");
    for (const auto& v : data_)
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]))
            throw DataError("deformation field contains non-finite displacements");
}

}  // namespace rdepth
