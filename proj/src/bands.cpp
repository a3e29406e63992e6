#include <algorithm>
#include <cmath>
#include <string>

#include "rdepth/bands.hpp"

namespace rdepth {

std::size_t BandPartition::band_size(int j) const
{
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(j)));
}

int band_index(double distance_mm, double band_width_mm)
{
    int j = std::max(1, static_cast<int>(std::ceil(distance_mm / band_width_mm)));
    while (j > 1 && distance_mm <= (j - 1) * band_width_mm)
        --j;
    while (distance_mm > j * band_width_mm)
        ++j;
    return j;
}

BandPartition build_bands(const RoiSet& roi, double band_width_mm, int m)
{
    if (!(band_width_mm > 0.0) || !std::isfinite(band_width_mm))
        throw std::invalid_argument("build_bands: band width must be positive");
    if (m < 1 || m > 255)
        throw std::invalid_argument("build_bands: band count must be in [1, 255], got " + std::to_string(m));
    roi.validate();
    if (roi.tumor.empty())
        throw std::invalid_argument("build_bands: tumor mask is empty");

    const Mask lesion = mask_union(roi.tumor, roi.peri);
    const Volume dist = distance_transform(lesion);

    BandPartition part;
    part.grid = roi.brain.grid();
    part.band_width_mm = band_width_mm;
    part.m = m;
    part.labels.assign(part.grid.size(), 0);
    const double outer = m * band_width_mm;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (!roi.brain[i] || lesion[i] || dist[i] > outer)
            continue;
        const int j = band_index(dist[i], band_width_mm);
        if (j <= m)
            part.labels[i] = static_cast<std::uint8_t>(j);
    }
    return part;
}

}  // namespace rdepth
