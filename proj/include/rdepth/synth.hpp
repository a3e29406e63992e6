#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdepth/features.hpp"
#include "rdepth/survival.hpp"
#include "rdepth/volume.hpp"

namespace rdepth {

enum class TextureKind { oriented, isotropic, constant };

/// Sphere-tumor phantom with a mass-effect-like radial displacement field.
/// Positions are physical: voxel (x, y, z) sits at (x·sx, y·sy, z·sz) mm.
struct PhantomSpec {
    Dims dims{64, 64, 64};
    Spacing spacing{2.0, 2.0, 2.0};
    std::optional<Vec3> center_mm;  // default: grid center
    double radius_mm = 10.0;
    double peri_mm = 3.0;           // thickness of the peri-tumoral shell
    double amplitude_mm = 2.0;      // |u| on the tumor surface
    double decay_mm = 20.0;         // e-folding length of |u| away from the surface

    TextureKind texture = TextureKind::oriented;
    double intensity_mean = 100.0;
    double contrast = 20.0;
    double wavelength_mm = 6.0;     // oriented texture period
    Vec3 direction{1.0, 1.0, 0.0};  // oriented texture wave vector direction
    double noise = 0.05;            // noise std relative to contrast
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on radius >= half the smallest physical
    /// extent, negative amplitude, non-positive decay and similar.
    void validate() const;
    Vec3 center() const;
};

/// Radial field u(r) = A·exp(-(r - R)/L)·r̂ for r > R and zero inside the
/// tumor sphere. Masks: tumor r <= R, peri R < r <= R + peri_mm, brain an
/// axis-aligned ellipsoid filling the grid. The RoiSet is validated before
/// returning.
std::pair<DeformationField, RoiSet> synth_deformation(const PhantomSpec& spec);

/// Intensity image of the requested texture kind over the whole grid.
Volume synth_texture(const PhantomSpec& spec);

struct CohortSpec {
    std::vector<double> beta;       // one coefficient per table column
    double baseline_hazard = 1.0 / 365.0;  // per day
    double censoring_rate = 0.2;    // target fraction censored, in [0, 1)
    std::uint64_t seed = 1;

    void validate(std::size_t n_subjects, std::size_t n_features) const;
};

/// Exponential proportional-hazards times T ~ Exp(h0·exp(x·beta)) with
/// independent uniform censoring C ~ U(0, c) where c is calibrated so the
/// expected censored fraction matches the target. Subject i uses its own
/// derived seed. Missing table values are rejected.
std::vector<SurvivalRecord> synth_survival(const FeatureTable& X, const CohortSpec& spec);

/// n × p table of independent standard normal features named
/// "{prefix}{j}" (j from 1) with subjects "S0001"...
FeatureTable synth_feature_table(std::size_t n, std::size_t p, std::uint64_t seed, const std::string& prefix = "f");

}  // namespace rdepth
