#pragma once

#include "rdepth/bands.hpp"
#include "rdepth/features.hpp"
#include "rdepth/volume.hpp"

namespace rdepth {

/// Bands with fewer voxels than this produce missing statistics.
inline constexpr std::size_t kMinBandVoxels = 10;

/// Per-voxel Euclidean norm of the displacement vector, in mm.
Volume magnitude(const DeformationField& field);

/// First-order statistics of the displacement magnitude inside each band,
/// flattened band-major as "deform_b{j}_{stat}" (m × 5 entries).
FeatureVector deformation_features(const DeformationField& field, const BandPartition& partition);

}  // namespace rdepth
