#include "rdepth/collage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SVD>

#include "rdepth/gradient.hpp"
#include "rdepth/parallel.hpp"
#include "rdepth/stats.hpp"
#include "rdepth/volume_io.hpp"

namespace rdepth {

std::vector<Index3> default_offsets()
{
    return {{1, 0, 0},  {0, 1, 0},  {0, 0, 1},   {1, 1, 0},  {1, -1, 0}, {1, 0, 1},   {1, 0, -1},
            {0, 1, 1},  {0, 1, -1}, {1, 1, 1},   {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
}

void CollageConfig::validate() const
{
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("collage window must be an odd integer >= 3");
    if (cooc_window < 3 || cooc_window % 2 == 0)
        throw std::invalid_argument("co-occurrence window must be an odd integer >= 3");
    if (bins < 2)
        throw std::invalid_argument("collage bins must be >= 2");
    if (offsets.empty())
        throw std::invalid_argument("collage offsets must be non-empty");
    for (std::size_t a = 0; a < offsets.size(); ++a) {
        const auto& o = offsets[a];
        if (o.x == 0 && o.y == 0 && o.z == 0)
            throw std::invalid_argument("collage offsets must be nonzero");
        for (std::size_t b = a + 1; b < offsets.size(); ++b) {
            const auto& q = offsets[b];
            // Antiparallel: q = -k o for some k > 0 (cross product zero, dot negative).
            const auto cx = o.y * q.z - o.z * q.y;
            const auto cy = o.z * q.x - o.x * q.z;
            const auto cz = o.x * q.y - o.y * q.x;
            const auto dot = o.x * q.x + o.y * q.y + o.z * q.z;
            if (cx == 0 && cy == 0 && cz == 0 && dot < 0)
                throw std::invalid_argument("collage offsets must be pairwise non-antiparallel");
        }
    }
}

GradientSet compute_gradients(const Volume& vol)
{
    return {gradient(vol, Axis::x), gradient(vol, Axis::y), gradient(vol, Axis::z)};
}

namespace {

struct Window {
    std::ptrdiff_t x0, x1, y0, y1, z0, z1;  // inclusive bounds
};

Window clamp_window(const Grid& grid, const Index3& c, int side)
{
    const std::ptrdiff_t r = side / 2;
    const auto& d = grid.dims();
    auto lo = [&](std::ptrdiff_t v) { return std::max<std::ptrdiff_t>(0, v - r); };
    auto hi = [&](std::ptrdiff_t v, std::size_t n) { return std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, v + r); };
    return {lo(c.x), hi(c.x, d.nx), lo(c.y), hi(c.y, d.ny), lo(c.z), hi(c.z, d.nz)};
}

}  // namespace

Eigen::Matrix<double, Eigen::Dynamic, 3> local_gradient_matrix(const GradientSet& grads, const Index3& c, int window)
{
    const Grid& grid = grads.gx.grid();
    const Window w = clamp_window(grid, c, window);
    const auto rows = (w.x1 - w.x0 + 1) * (w.y1 - w.y0 + 1) * (w.z1 - w.z0 + 1);
    Eigen::Matrix<double, Eigen::Dynamic, 3> F(rows, 3);
    Eigen::Index r = 0;
    for (auto z = w.z0; z <= w.z1; ++z)
        for (auto y = w.y0; y <= w.y1; ++y)
            for (auto x = w.x0; x <= w.x1; ++x) {
                const auto i = grid.index(Index3{x, y, z});
                F(r, 0) = grads.gx[i];
                F(r, 1) = grads.gy[i];
                F(r, 2) = grads.gz[i];
                ++r;
            }
    return F;
}

Orientation dominant_orientation(const Eigen::Matrix<double, Eigen::Dynamic, 3>& F)
{
    if (F.rows() == 0 || F.cwiseAbs().maxCoeff() == 0.0)
        return {};

    Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(F, Eigen::ComputeFullV);
    if (svd.singularValues()(0) == 0.0)
        return {};
    Eigen::Vector3d psi = svd.matrixV().col(0);

    bool flip = false;
    if (psi.x() != 0.0)
        flip = psi.x() < 0.0;
    else if (psi.y() != 0.0)
        flip = psi.y() < 0.0;
    else
        flip = psi.z() < 0.0;
    if (flip)
        psi = -psi;
    // Turn any -0.0 into +0.0 so atan2 stays on the (-pi/2, pi/2] branch.
    psi.array() += 0.0;

    Orientation o;
    o.theta = std::atan2(psi.y(), psi.x());
    o.phi = std::atan2(psi.z(), std::hypot(psi.x(), psi.y()));
    return o;
}

int quantize_angle(double angle, int bins)
{
    const double half_pi = std::numbers::pi / 2.0;
    const double t = (angle + half_pi) / std::numbers::pi * bins;
    const int b = static_cast<int>(std::ceil(t)) - 1;
    return std::clamp(b, 0, bins - 1);
}

void cooccurrence(const LevelMap& qmap, const Index3& c, const CollageConfig& cfg, CoocMatrix& out)
{
    out.reset();
    const Grid& grid = qmap.grid;
    const Window w = clamp_window(grid, c, cfg.cooc_window);
    auto inside = [&](std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) {
        return x >= w.x0 && x <= w.x1 && y >= w.y0 && y <= w.y1 && z >= w.z0 && z <= w.z1;
    };

    for (auto z = w.z0; z <= w.z1; ++z)
        for (auto y = w.y0; y <= w.y1; ++y)
            for (auto x = w.x0; x <= w.x1; ++x) {
                const int a = qmap.levels[grid.index(Index3{x, y, z})];
                if (a < 0)
                    continue;
                for (const auto& o : cfg.offsets) {
                    const auto qx = x + o.x, qy = y + o.y, qz = z + o.z;
                    if (!inside(qx, qy, qz))
                        continue;
                    const int b = qmap.levels[grid.index(Index3{qx, qy, qz})];
                    if (b >= 0)
                        out.add_pair(a, b);
                }
            }
}

CoocMatrix cooccurrence(const LevelMap& qmap, const Index3& c, const CollageConfig& cfg)
{
    CoocMatrix m(cfg.bins);
    cooccurrence(qmap, c, cfg, m);
    return m;
}

CollageMaps compute_collage_maps(const Volume& vol, const Mask& roi, const CollageConfig& cfg)
{
    cfg.validate();
    require_same_grid(vol.grid(), roi.grid(), "collage");

    CollageMaps maps;
    maps.grid = vol.grid();
    for (std::size_t i = 0; i < roi.size(); ++i)
        if (roi[i])
            maps.voxels.push_back(i);
    const std::size_t n = maps.voxels.size();
    if (n == 0)
        return maps;

    const GradientSet grads = compute_gradients(vol);
    maps.orientation.resize(n);
    parallel_for(n, cfg.workers, [&](std::size_t k) {
        const auto c = vol.grid().coords(maps.voxels[k]);
        maps.orientation[k] = dominant_orientation(local_gradient_matrix(grads, c, cfg.window));
    });

    LevelMap qtheta{vol.grid(), std::vector<int>(vol.size(), -1)};
    LevelMap qphi{vol.grid(), std::vector<int>(vol.size(), -1)};
    for (std::size_t k = 0; k < n; ++k) {
        qtheta.levels[maps.voxels[k]] = quantize_angle(maps.orientation[k].theta, cfg.bins);
        qphi.levels[maps.voxels[k]] = quantize_angle(maps.orientation[k].phi, cfg.bins);
    }

    maps.theta_stats.resize(n);
    maps.phi_stats.resize(n);
    const unsigned workers = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.workers;
    const std::size_t chunks = std::min<std::size_t>(n, workers);
    const std::size_t per_chunk = (n + chunks - 1) / chunks;
    parallel_for(chunks, workers, [&](std::size_t chunk) {
        CoocMatrix m(cfg.bins);
        const std::size_t lo = chunk * per_chunk;
        const std::size_t hi = std::min(n, lo + per_chunk);
        for (std::size_t k = lo; k < hi; ++k) {
            const auto c = vol.grid().coords(maps.voxels[k]);
            cooccurrence(qtheta, c, cfg, m);
            maps.theta_stats[k] = haralick(m);
            cooccurrence(qphi, c, cfg, m);
            maps.phi_stats[k] = haralick(m);
        }
    });
    return maps;
}

namespace {

constexpr const char* kAngleNames[2] = {"theta", "phi"};

std::string feature_name(int angle, int stat, std::size_t first_order)
{
    return std::string("collage_") + kAngleNames[angle] + "_" + std::string(FirstOrderStats::names[first_order]) +
           "_" + std::string(HaralickVector::names[static_cast<std::size_t>(stat)]);
}

}  // namespace

FeatureVector collage_missing_features()
{
    FeatureVector fv;
    for (int a = 0; a < 2; ++a)
        for (int s = 0; s < HaralickVector::count; ++s)
            for (std::size_t f = 0; f < FirstOrderStats::names.size(); ++f)
                fv.push(feature_name(a, s, f), kMissing);
    return fv;
}

FeatureVector collage_features_from_maps(const CollageMaps& maps)
{
    if (maps.voxels.size() < kMinRoiVoxels)
        return collage_missing_features();

    FeatureVector fv;
    std::vector<double> sample;
    for (int a = 0; a < 2; ++a) {
        const auto& stats = a == 0 ? maps.theta_stats : maps.phi_stats;
        for (int s = 0; s < HaralickVector::count; ++s) {
            sample.clear();
            for (const auto& h : stats)
                if (!h.missing())
                    sample.push_back(h[s]);
            const auto fo = sample.empty() ? FirstOrderStats::missing() : first_order(sample);
            const auto v = fo.values();
            for (std::size_t f = 0; f < v.size(); ++f)
                fv.push(feature_name(a, s, f), v[f]);
        }
    }
    return fv;
}

FeatureVector collage_features(const Volume& vol, const Mask& roi, const CollageConfig& cfg)
{
    cfg.validate();
    require_same_grid(vol.grid(), roi.grid(), "collage");
    if (roi.count() < kMinRoiVoxels)
        return collage_missing_features();
    return collage_features_from_maps(compute_collage_maps(vol, roi, cfg));
}

void export_collage_maps(const CollageMaps& maps, const std::filesystem::path& dir, const std::string& prefix)
{
    std::filesystem::create_directories(dir);
    const double nan = kMissing;
    Volume theta(maps.grid, nan), phi(maps.grid, nan);
    for (std::size_t k = 0; k < maps.voxels.size(); ++k) {
        theta[maps.voxels[k]] = maps.orientation[k].theta;
        phi[maps.voxels[k]] = maps.orientation[k].phi;
    }
    write_volume(dir / (prefix + "_theta"), theta, DType::f32);
    write_volume(dir / (prefix + "_phi"), phi, DType::f32);

    for (int a = 0; a < 2; ++a) {
        const auto& stats = a == 0 ? maps.theta_stats : maps.phi_stats;
        for (int s = 0; s < HaralickVector::count; ++s) {
            Volume map(maps.grid, nan);
            for (std::size_t k = 0; k < maps.voxels.size(); ++k)
                map[maps.voxels[k]] = stats[k][s];
            write_volume(dir / (prefix + "_" + kAngleNames[a] + "_" +
                                std::string(HaralickVector::names[static_cast<std::size_t>(s)])),
                         map, DType::f32);
        }
    }
}

}  // namespace rdepth
