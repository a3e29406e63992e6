#pragma once

#include <cstdint>
#include <vector>

#include "rdepth/stats.hpp"
#include "rdepth/volume.hpp"

namespace rdepth {

/// Exact Euclidean distance (mm) from every voxel to the nearest foreground
/// voxel of `mask`, honoring anisotropic spacing; zero on the foreground.
/// Separable lower-envelope algorithm, linear in the voxel count. Throws
/// std::invalid_argument on an empty mask.
Volume distance_transform(const Mask& mask);

/// Concentric bands of normal-appearing parenchyma around the lesion.
/// labels[i] == j (1..m) iff voxel i is in the brain, outside tumor and
/// peri, and its distance d from tumor ∪ peri satisfies (j-1)w < d <= jw;
/// all other voxels carry 0.
struct BandPartition {
    static constexpr double kDefaultWidthMm = 5.0;
    static constexpr int kDefaultCount = 12;

    Grid grid;
    double band_width_mm = kDefaultWidthMm;
    int m = kDefaultCount;
    std::vector<std::uint8_t> labels;

    std::size_t band_size(int j) const;
};

/// Bands are measured from the margin of tumor ∪ peri and never include
/// either compartment. Outer bands may be empty when m·w exceeds the volume.
BandPartition build_bands(const RoiSet& roi, double band_width_mm = BandPartition::kDefaultWidthMm,
                          int m = BandPartition::kDefaultCount);

/// Band index for a distance d > 0: the j with (j-1)w < d <= jw.
int band_index(double distance_mm, double band_width_mm);

}  // namespace rdepth
