#include "rdepth/descriptor.hpp"

#include <stdexcept>

#include "rdepth/deform.hpp"

namespace rdepth {

void DescriptorConfig::validate() const
{
    if (!(band_width_mm > 0.0))
        throw std::invalid_argument("band width must be positive");
    if (m < 1 || m > 255)
        throw std::invalid_argument("band count must be in 1..255");
    collage.validate();
}

std::vector<std::string> descriptor_names(const DescriptorConfig& cfg, bool deform, bool collage)
{
    std::vector<std::string> names;
    if (deform)
        for (int j = 1; j <= cfg.m; ++j)
            for (const auto& s : FirstOrderStats::names)
                names.push_back("deform_b" + std::to_string(j) + "_" + std::string(s));
    if (collage) {
        const auto c = collage_missing_features();
        for (const char* prefix : {"T_", "P_"})
            for (const auto& n : c.names)
                names.push_back(prefix + n);
    }
    return names;
}

FeatureVector deform_descriptor(const DeformationField& field, const RoiSet& roi, const DescriptorConfig& cfg)
{
    cfg.validate();
    roi.validate();
    require_same_grid(field.grid(), roi.brain.grid(), "deformation field vs masks");
    return deformation_features(field, build_bands(roi, cfg.band_width_mm, cfg.m));
}

FeatureVector collage_descriptor(const Volume& intensity, const RoiSet& roi, const DescriptorConfig& cfg)
{
    cfg.validate();
    roi.validate();
    require_same_grid(intensity.grid(), roi.brain.grid(), "intensity vs masks");
    FeatureVector out;
    out.append(collage_features(intensity, roi.tumor, cfg.collage), "T_");
    out.append(collage_features(intensity, roi.peri, cfg.collage), "P_");
    return out;
}

FeatureVector full_descriptor(const Volume& intensity, const DeformationField& field, const RoiSet& roi,
                              const DescriptorConfig& cfg)
{
    FeatureVector out = deform_descriptor(field, roi, cfg);
    out.append(collage_descriptor(intensity, roi, cfg));
    return out;
}

}  // namespace rdepth
