#pragma once

#include <string>
#include <vector>

#include "rdepth/bands.hpp"
#include "rdepth/collage.hpp"
#include "rdepth/features.hpp"
#include "rdepth/volume.hpp"

namespace rdepth {

struct DescriptorConfig {
    double band_width_mm = BandPartition::kDefaultWidthMm;
    int m = BandPartition::kDefaultCount;
    CollageConfig collage;

    void validate() const;
};

/// Column layout of the full descriptor: the m × 5 "deform_b{j}_{stat}"
/// entries, then the 130 collage entries for the tumor prefixed "T_", then
/// the same 130 for the peri-tumoral compartment prefixed "P_".
std::vector<std::string> descriptor_names(const DescriptorConfig& cfg, bool deform = true, bool collage = true);

FeatureVector deform_descriptor(const DeformationField& field, const RoiSet& roi, const DescriptorConfig& cfg);

/// Tumor and peri COLLAGE features; a compartment below kMinRoiVoxels gives
/// missing values.
FeatureVector collage_descriptor(const Volume& intensity, const RoiSet& roi, const DescriptorConfig& cfg);

FeatureVector full_descriptor(const Volume& intensity, const DeformationField& field, const RoiSet& roi,
                              const DescriptorConfig& cfg);

}  // namespace rdepth
