#pragma once

// Volume container format: a JSON header `<name>.volhdr` next to a raw
// little-endian payload `<name>.volraw`.
//
//   {"dims":[nx,ny,nz], "spacing":[sx,sy,sz], "dtype":"f32"|"f64"|"u8",
//    "order":"xyz-row-major", "channels":1}
//
// Multi-channel payloads (deformation fields, channels = 3) are stored
// planar: every voxel of channel 0 in xyz order, then channel 1, then 2.

#include <filesystem>
#include <string>

#include "rdepth/volume.hpp"

namespace rdepth {

enum class DType { f32, f64, u8 };

/// Accepts "foo", "foo.volhdr" or "foo.volraw" and returns "foo".
std::filesystem::path container_stem(const std::filesystem::path& path);

Volume load_volume(const std::filesystem::path& path);
void write_volume(const std::filesystem::path& path, const Volume& vol, DType dtype = DType::f64);

/// Masks are u8 payloads with values in {0, 1}.
Mask load_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const Mask& mask);

/// u8 labeled volume with arbitrary values (band partitions).
void write_labels(const std::filesystem::path& path, const Grid& grid, std::span<const std::uint8_t> labels);
std::vector<std::uint8_t> load_labels(const std::filesystem::path& path, Grid& grid);

DeformationField load_field(const std::filesystem::path& path);
void write_field(const std::filesystem::path& path, const DeformationField& field, DType dtype = DType::f64);

}  // namespace rdepth
