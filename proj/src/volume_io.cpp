#include "rdepth/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rdepth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Header {
    Grid grid;
    DType dtype = DType::f64;
    std::size_t channels = 1;
};

std::size_t dtype_size(DType t)
{
    switch (t) {
    case DType::f32: return 4;
    case DType::f64: return 8;
    case DType::u8: return 1;
    }
    return 0;
}

const char* dtype_name(DType t)
{
    switch (t) {
    case DType::f32: return "f32";
    case DType::f64: return "f64";
    case DType::u8: return "u8";
    }
    return "?";
}

fs::path header_path(const fs::path& stem) { return fs::path(stem.string() + ".volhdr"); }
fs::path payload_path(const fs::path& stem) { return fs::path(stem.string() + ".volraw"); }

Header read_header(const fs::path& stem)
{
    const auto hp = header_path(stem);
    std::ifstream in(hp);
    if (!in)
        throw DataError("cannot open volume header " + hp.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed volume header " + hp.string() + ": " + e.what());
    }

    Header h;
    try {
        const auto dims = j.at("dims").get<std::vector<long long>>();
        const auto spacing = j.at("spacing").get<std::vector<double>>();
        if (dims.size() != 3 || spacing.size() != 3)
            throw DataError("dims and spacing must have three entries");
        for (auto d : dims)
            if (d <= 0)
                throw DataError("dims must be positive");
        for (auto s : spacing)
            if (!std::isfinite(s) || s <= 0.0)
                throw DataError("spacing must be finite and positive");
        h.grid = Grid({static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                       static_cast<std::size_t>(dims[2])},
                      {spacing[0], spacing[1], spacing[2]});

        const auto dtype = j.at("dtype").get<std::string>();
        if (dtype == "f32")
            h.dtype = DType::f32;
        else if (dtype == "f64")
            h.dtype = DType::f64;
        else if (dtype == "u8")
            h.dtype = DType::u8;
        else
            throw DataError("unsupported dtype '" + dtype + "'");

        if (j.contains("order") && j["order"].get<std::string>() != "xyz-row-major")
            throw DataError("unsupported voxel order '" + j["order"].get<std::string>() + "'");
        if (j.contains("channels")) {
            const auto c = j["channels"].get<long long>();
            if (c <= 0)
                throw DataError("channels must be positive");
            h.channels = static_cast<std::size_t>(c);
        }
    } catch (const json::exception& e) {
        throw DataError("malformed volume header " + hp.string() + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError("malformed volume header " + hp.string() + ": " + e.what());
    }
    return h;
}

void write_header(const fs::path& stem, const Grid& grid, DType dtype, std::size_t channels)
{
    const auto& d = grid.dims();
    const auto& s = grid.spacing();
    json j;
    j["dims"] = {d.nx, d.ny, d.nz};
    j["spacing"] = {s.sx, s.sy, s.sz};
    j["dtype"] = dtype_name(dtype);
    j["order"] = "xyz-row-major";
    j["channels"] = channels;
    std::ofstream out(header_path(stem));
    if (!out)
        throw DataError("cannot write volume header " + header_path(stem).string());
    out << j.dump(2) << '\n';
}

template <typename T>
T from_little_endian(const unsigned char* p)
{
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

template <typename T>
void append_little_endian(std::vector<unsigned char>& out, T v)
{
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

std::vector<unsigned char> read_payload(const fs::path& stem, const Header& h)
{
    const auto pp = payload_path(stem);
    std::ifstream in(pp, std::ios::binary);
    if (!in)
        throw DataError("cannot open volume payload " + pp.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t expected = h.grid.size() * h.channels * dtype_size(h.dtype);
    if (bytes.size() != expected) {
        std::ostringstream msg;
        msg << "payload size mismatch for " << pp.string() << ": expected " << expected << " bytes, found "
            << bytes.size();
        throw DataError(msg.str());
    }
    return bytes;
}

/// Decodes `count` values starting at element `offset` to double.
std::vector<double> decode(const std::vector<unsigned char>& bytes, DType t, std::size_t offset, std::size_t count)
{
    std::vector<double> out(count);
    const auto w = dtype_size(t);
    const unsigned char* base = bytes.data() + offset * w;
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned char* p = base + i * w;
        switch (t) {
        case DType::f32: out[i] = from_little_endian<float>(p); break;
        case DType::f64: out[i] = from_little_endian<double>(p); break;
        case DType::u8: out[i] = *p; break;
        }
    }
    return out;
}

void encode(std::vector<unsigned char>& out, std::span<const double> values, DType t)
{
    for (double v : values) {
        switch (t) {
        case DType::f32: append_little_endian<float>(out, static_cast<float>(v)); break;
        case DType::f64: append_little_endian<double>(out, v); break;
        case DType::u8: out.push_back(static_cast<unsigned char>(v)); break;
        }
    }
}

void write_payload(const fs::path& stem, const std::vector<unsigned char>& bytes)
{
    const auto pp = payload_path(stem);
    std::ofstream out(pp, std::ios::binary);
    if (!out)
        throw DataError("cannot write volume payload " + pp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

fs::path container_stem(const fs::path& path)
{
    const auto ext = path.extension();
    if (ext == ".volhdr" || ext == ".volraw")
        return path.parent_path() / path.stem();
    return path;
}

Volume load_volume(const fs::path& path)
{
    const auto stem = container_stem(path);
    const auto h = read_header(stem);
    if (h.channels != 1)
        throw DataError("expected a single-channel volume in " + stem.string());
    const auto bytes = read_payload(stem, h);
    return Volume(h.grid, decode(bytes, h.dtype, 0, h.grid.size()));
}

void write_volume(const fs::path& path, const Volume& vol, DType dtype)
{
    const auto stem = container_stem(path);
    std::vector<unsigned char> bytes;
    bytes.reserve(vol.size() * dtype_size(dtype));
    encode(bytes, vol.data(), dtype);
    write_header(stem, vol.grid(), dtype, 1);
    write_payload(stem, bytes);
}

std::vector<std::uint8_t> load_labels(const fs::path& path, Grid& grid)
{
    const auto stem = container_stem(path);
    const auto h = read_header(stem);
    if (h.channels != 1 || h.dtype != DType::u8)
        throw DataError("expected a single-channel u8 label volume in " + stem.string());
    auto bytes = read_payload(stem, h);
    grid = h.grid;
    return {bytes.begin(), bytes.end()};
}

void write_labels(const fs::path& path, const Grid& grid, std::span<const std::uint8_t> labels)
{
    if (labels.size() != grid.size())
        throw std::invalid_argument("label count does not match grid");
    const auto stem = container_stem(path);
    write_header(stem, grid, DType::u8, 1);
    write_payload(stem, std::vector<unsigned char>(labels.begin(), labels.end()));
}

Mask load_mask(const fs::path& path)
{
    Grid grid;
    auto labels = load_labels(path, grid);
    for (auto v : labels)
        if (v > 1)
            throw DataError("mask " + container_stem(path).string() + " has values outside {0,1}");
    return Mask(grid, std::move(labels));
}

void write_mask(const fs::path& path, const Mask& mask) { write_labels(path, mask.grid(), mask.data()); }

DeformationField load_field(const fs::path& path)
{
    const auto stem = container_stem(path);
    const auto h = read_header(stem);
    if (h.channels != 3)
        throw DataError("deformation field " + stem.string() + " must declare channels: 3");
    if (h.dtype == DType::u8)
        throw DataError("deformation field " + stem.string() + " must be floating point");
    const auto bytes = read_payload(stem, h);
    const std::size_t n = h.grid.size();
    std::vector<Vec3> data(n);
    for (int c = 0; c < 3; ++c) {
        const auto channel = decode(bytes, h.dtype, c * n, n);
        for (std::size_t i = 0; i < n; ++i)
            data[i][c] = channel[i];
    }
    return DeformationField(h.grid, std::move(data));
}

void write_field(const fs::path& path, const DeformationField& field, DType dtype)
{
    if (dtype == DType::u8)
        throw std::invalid_argument("deformation fields must be written as floating point");
    const auto stem = container_stem(path);
    const std::size_t n = field.size();
    std::vector<unsigned char> bytes;
    bytes.reserve(3 * n * dtype_size(dtype));
    std::vector<double> channel(n);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < n; ++i)
            channel[i] = field[i][c];
        encode(bytes, channel, dtype);
    }
    write_header(stem, field.grid(), dtype, 3);
    write_payload(stem, bytes);
}

}  // namespace rdepth
