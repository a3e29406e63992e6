#pragma once

#include "rdepth/volume.hpp"

namespace rdepth {

/// Spacing-aware finite-difference derivative along one axis, in intensity
/// units per millimeter. Central differences in the interior, first-order
/// one-sided differences on the two boundary slabs. Requires at least two
/// voxels along `axis`.
Volume gradient(const Volume& vol, Axis axis);

}  // namespace rdepth
