#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "rdepth/features.hpp"
#include "rdepth/haralick.hpp"
#include "rdepth/volume.hpp"

namespace rdepth {

/// The 13 unique unit-neighborhood directions (one of each antipodal pair).
std::vector<Index3> default_offsets();

struct CollageConfig {
    int window = 5;        // N for the N×N×N gradient window
    int bins = 64;         // angle quantization levels over (-pi/2, pi/2]
    std::vector<Index3> offsets = default_offsets();
    int cooc_window = 5;   // side of the co-occurrence neighborhood
    unsigned workers = 1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// ROIs with fewer voxels than this yield all-missing COLLAGE features.
inline constexpr std::size_t kMinRoiVoxels = 10;

struct GradientSet {
    Volume gx, gy, gz;
};

GradientSet compute_gradients(const Volume& vol);

/// Gradient vectors of every voxel in the N³ window centered on `c`,
/// truncated at the volume border, one row per voxel in x-fastest order.
Eigen::Matrix<double, Eigen::Dynamic, 3> local_gradient_matrix(const GradientSet& grads, const Index3& c, int window);

struct Orientation {
    double theta = 0;  // in-plane angle atan(psi_y / psi_x)
    double phi = 0;    // elevation atan(psi_z / |psi_xy|)
};

/// Dominant gradient direction psi (right singular vector of the largest
/// singular value of F) as two angles in (-pi/2, pi/2]. psi is made
/// canonical by requiring psi_x >= 0, then psi_y >= 0 if psi_x == 0, then
/// psi_z >= 0. A zero matrix gives (0, 0).
Orientation dominant_orientation(const Eigen::Matrix<double, Eigen::Dynamic, 3>& F);

/// Uniform bin in [0, bins) for an angle in (-pi/2, pi/2]; bins are
/// half-open on the left, (lo, hi].
int quantize_angle(double angle, int bins);

/// Per-voxel quantized angle levels; -1 marks voxels outside the ROI.
struct LevelMap {
    Grid grid;
    std::vector<int> levels;
};

/// Symmetric counts of level pairs (p, p + o), o in cfg.offsets, where both
/// p and p + o are in-ROI voxels of the cooc_window neighborhood around `c`
/// (truncated at the border).
CoocMatrix cooccurrence(const LevelMap& qmap, const Index3& c, const CollageConfig& cfg);
/// Same, accumulating into a caller-owned matrix (reset first).
void cooccurrence(const LevelMap& qmap, const Index3& c, const CollageConfig& cfg, CoocMatrix& out);

/// Everything computed per ROI voxel; `voxels` lists linear indices in
/// increasing order and the other vectors are parallel to it.
struct CollageMaps {
    Grid grid;
    std::vector<std::size_t> voxels;
    std::vector<Orientation> orientation;
    std::vector<HaralickVector> theta_stats;
    std::vector<HaralickVector> phi_stats;
};

CollageMaps compute_collage_maps(const Volume& vol, const Mask& roi, const CollageConfig& cfg);

/// 130 features named "collage_{theta|phi}_{stat}_{haralick}", ordered by
/// angle, then Haralick statistic, then first-order statistic.
FeatureVector collage_features(const Volume& vol, const Mask& roi, const CollageConfig& cfg);
FeatureVector collage_features_from_maps(const CollageMaps& maps);
/// All-missing vector with the standard names.
FeatureVector collage_missing_features();

/// Writes theta/phi angle maps and the 26 per-voxel Haralick maps as f32
/// volumes named <prefix>_theta, <prefix>_phi, <prefix>_{theta|phi}_{stat}.
/// Voxels outside the ROI hold NaN.
void export_collage_maps(const CollageMaps& maps, const std::filesystem::path& dir, const std::string& prefix);

}  // namespace rdepth
