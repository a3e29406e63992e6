#include "rdepth/deform.hpp"

#include <cmath>
#include <string>

namespace rdepth {

Volume magnitude(const DeformationField& field)
{
    Volume out(field.grid());
    for (std::size_t i = 0; i < field.size(); ++i) {
        const auto& v = field[i];
        out[i] = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    return out;
}

FeatureVector deformation_features(const DeformationField& field, const BandPartition& partition)
{
    require_same_grid(field.grid(), partition.grid, "deformation_features");
    const Volume mag = magnitude(field);

    std::vector<std::vector<double>> per_band(partition.m);
    for (std::size_t i = 0; i < mag.size(); ++i) {
        const int j = partition.labels[i];
        if (j >= 1 && j <= partition.m)
            per_band[j - 1].push_back(mag[i]);
    }

    FeatureVector fv;
    for (int j = 1; j <= partition.m; ++j) {
        const auto& vals = per_band[j - 1];
        const auto stats = vals.size() < kMinBandVoxels ? FirstOrderStats::missing() : first_order(vals);
        const auto v = stats.values();
        for (std::size_t s = 0; s < v.size(); ++s)
            fv.push("deform_b" + std::to_string(j) + "_" + std::string(FirstOrderStats::names[s]), v[s]);
    }
    return fv;
}

}  // namespace rdepth
