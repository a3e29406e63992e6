#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdepth {

/// Raised when input data (files, tables, volumes) violates a format or
/// consistency requirement. Precondition violations on arguments use
/// std::invalid_argument instead.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dims {
    std::size_t nx = 0, ny = 0, nz = 0;

    std::size_t count() const { return nx * ny * nz; }
    std::size_t operator[](int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Voxel size in millimeters.
struct Spacing {
    double sx = 1.0, sy = 1.0, sz = 1.0;

    double operator[](int axis) const { return axis == 0 ? sx : axis == 1 ? sy : sz; }
    friend bool operator==(const Spacing&, const Spacing&) = default;
};

enum class Axis { x = 0, y = 1, z = 2 };

struct Index3 {
    std::ptrdiff_t x = 0, y = 0, z = 0;
};

/// Geometry shared by every voxel container. Voxels are stored row-major
/// with x fastest: linear index = x + nx * (y + ny * z).
class Grid {
public:
    Grid() = default;
    Grid(Dims dims, Spacing spacing);

    const Dims& dims() const { return dims_; }
    const Spacing& spacing() const { return spacing_; }
    std::size_t size() const { return dims_.count(); }

    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const
    {
        return x + dims_.nx * (y + dims_.ny * z);
    }
    Index3 coords(std::size_t linear) const
    {
        const auto x = linear % dims_.nx;
        const auto rest = linear / dims_.nx;
        return {static_cast<std::ptrdiff_t>(x), static_cast<std::ptrdiff_t>(rest % dims_.ny),
                static_cast<std::ptrdiff_t>(rest / dims_.ny)};
    }
    bool contains(const Index3& c) const
    {
        return c.x >= 0 && c.y >= 0 && c.z >= 0 && static_cast<std::size_t>(c.x) < dims_.nx &&
               static_cast<std::size_t>(c.y) < dims_.ny && static_cast<std::size_t>(c.z) < dims_.nz;
    }
    std::size_t index(const Index3& c) const
    {
        return index(static_cast<std::size_t>(c.x), static_cast<std::size_t>(c.y),
                     static_cast<std::size_t>(c.z));
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Dims dims_;
    Spacing spacing_;
};

/// Throws std::invalid_argument naming `what` if the two grids differ.
void require_same_grid(const Grid& a, const Grid& b, const std::string& what);

/// Scalar 3D image in double precision.
class Volume {
public:
    Volume() = default;
    explicit Volume(Grid grid, double fill = 0.0);
    Volume(Grid grid, std::vector<double> data);

    const Grid& grid() const { return grid_; }
    const Dims& dims() const { return grid_.dims(); }
    const Spacing& spacing() const { return grid_.spacing(); }
    std::size_t size() const { return data_.size(); }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double at(std::size_t x, std::size_t y, std::size_t z) const { return data_[grid_.index(x, y, z)]; }
    double& at(std::size_t x, std::size_t y, std::size_t z) { return data_[grid_.index(x, y, z)]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

private:
    Grid grid_;
    std::vector<double> data_;
};

/// Per-voxel boolean region. Also used, with values above one, for labeled
/// partitions (see BandPartition).
class Mask {
public:
    Mask() = default;
    explicit Mask(Grid grid, bool fill = false);
    Mask(Grid grid, std::vector<std::uint8_t> data);

    const Grid& grid() const { return grid_; }
    const Dims& dims() const { return grid_.dims(); }
    const Spacing& spacing() const { return grid_.spacing(); }
    std::size_t size() const { return data_.size(); }

    bool operator[](std::size_t i) const { return data_[i] != 0; }
    void set(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }
    bool at(std::size_t x, std::size_t y, std::size_t z) const { return data_[grid_.index(x, y, z)] != 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::span<const std::uint8_t> data() const { return data_; }

private:
    Grid grid_;
    std::vector<std::uint8_t> data_;
};

Mask mask_union(const Mask& a, const Mask& b);

/// Lesion compartments plus the brain mask they live in.
struct RoiSet {
    Mask brain;
    Mask tumor;  // enhancing lesion
    Mask peri;   // peri-lesional hyperintensity

    /// Checks shared geometry, tumor/peri containment in brain and
    /// tumor/peri disjointness. Throws DataError on violation.
    void validate() const;
};

using Vec3 = std::array<double, 3>;

/// Per-voxel displacement vectors in millimeters.
class DeformationField {
public:
    DeformationField() = default;
    explicit DeformationField(Grid grid);
    DeformationField(Grid grid, std::vector<Vec3> data);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }
    const Vec3& operator[](std::size_t i) const { return data_[i]; }
    Vec3& operator[](std::size_t i) { return data_[i]; }
    std::span<const Vec3> data() const { return data_; }

private:
    Grid grid_;
    std::vector<Vec3> data_;
};

}  // namespace rdepth
