#include "rdepth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "rdepth/rng.hpp"

namespace rdepth {

Vec3 PhantomSpec::center() const
{
    if (center_mm)
        return *center_mm;
    return {0.5 * static_cast<double>(dims.nx - 1) * spacing.sx, 0.5 * static_cast<double>(dims.ny - 1) * spacing.sy,
            0.5 * static_cast<double>(dims.nz - 1) * spacing.sz};
}

void PhantomSpec::validate() const
{
    const Grid grid(dims, spacing);  // checks dims and spacing
    (void)grid;
    const double min_extent = std::min({dims.nx * spacing.sx, dims.ny * spacing.sy, dims.nz * spacing.sz});
    if (!(radius_mm > 0.0) || !(radius_mm < 0.5 * min_extent))
        throw std::invalid_argument("phantom radius must be positive and below half the smallest physical extent");
    if (!(amplitude_mm >= 0.0))
        throw std::invalid_argument("phantom amplitude must be >= 0");
    if (!(decay_mm > 0.0))
        throw std::invalid_argument("phantom decay length must be positive");
    if (!(peri_mm >= 0.0))
        throw std::invalid_argument("phantom peri-tumoral thickness must be >= 0");
    if (texture == TextureKind::oriented) {
        if (!(wavelength_mm > 0.0))
            throw std::invalid_argument("oriented texture needs a positive wavelength");
        if (std::hypot(direction[0], direction[1], direction[2]) == 0.0)
            throw std::invalid_argument("oriented texture needs a nonzero direction");
    }
    if (!(noise >= 0.0))
        throw std::invalid_argument("texture noise must be >= 0");
}

std::pair<DeformationField, RoiSet> synth_deformation(const PhantomSpec& spec)
{
    spec.validate();
    const Grid grid(spec.dims, spec.spacing);
    const Vec3 c = spec.center();
    const auto& d = spec.dims;
    const auto& s = spec.spacing;
    const double semi[3] = {0.47 * d.nx * s.sx, 0.47 * d.ny * s.sy, 0.47 * d.nz * s.sz};
    const double mid[3] = {0.5 * (d.nx - 1) * s.sx, 0.5 * (d.ny - 1) * s.sy, 0.5 * (d.nz - 1) * s.sz};

    DeformationField field(grid);
    RoiSet roi{Mask(grid), Mask(grid), Mask(grid)};
    const double R = spec.radius_mm;
    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y)
            for (std::size_t x = 0; x < d.nx; ++x) {
                const std::size_t i = grid.index(x, y, z);
                const double p[3] = {x * s.sx, y * s.sy, z * s.sz};
                const double v[3] = {p[0] - c[0], p[1] - c[1], p[2] - c[2]};
                const double r = std::hypot(v[0], v[1], v[2]);

                double e = 0;
                for (int a = 0; a < 3; ++a)
                    e += (p[a] - mid[a]) * (p[a] - mid[a]) / (semi[a] * semi[a]);
                roi.brain.set(i, e <= 1.0);

                if (r <= R) {
                    roi.tumor.set(i, true);
                    continue;
                }
                if (r <= R + spec.peri_mm)
                    roi.peri.set(i, true);
                const double mag = spec.amplitude_mm * std::exp(-(r - R) / spec.decay_mm);
                field[i] = {mag * v[0] / r, mag * v[1] / r, mag * v[2] / r};
            }

    try {
        roi.validate();
    } catch (const DataError& e) {
        throw std::invalid_argument(std::string("phantom lesion does not fit inside the brain: ") + e.what());
    }
    return {std::move(field), std::move(roi)};
}

Volume synth_texture(const PhantomSpec& spec)
{
    spec.validate();
    const Grid grid(spec.dims, spec.spacing);
    Volume vol(grid, spec.intensity_mean);
    if (spec.texture == TextureKind::constant)
        return vol;

    Rng rng(spec.seed);
    const auto& d = spec.dims;
    const auto& s = spec.spacing;
    const double norm = std::hypot(spec.direction[0], spec.direction[1], spec.direction[2]);
    const double k[3] = {spec.direction[0] / norm, spec.direction[1] / norm, spec.direction[2] / norm};
    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y)
            for (std::size_t x = 0; x < d.nx; ++x) {
                double v = spec.intensity_mean;
                if (spec.texture == TextureKind::oriented) {
                    const double phase = (k[0] * x * s.sx + k[1] * y * s.sy + k[2] * z * s.sz) / spec.wavelength_mm;
                    v += spec.contrast * std::sin(2.0 * std::numbers::pi * phase);
                    v += spec.noise * spec.contrast * rng.normal();
                } else {
                    v += spec.contrast * rng.normal();
                }
                vol.at(x, y, z) = v;
            }
    return vol;
}

void CohortSpec::validate(std::size_t n_subjects, std::size_t n_features) const
{
    if (n_subjects < 2)
        throw std::invalid_argument("cohort needs at least two subjects");
    if (beta.size() != n_features)
        throw std::invalid_argument("cohort beta length does not match the number of features");
    if (!(baseline_hazard > 0.0))
        throw std::invalid_argument("baseline hazard must be positive");
    if (!(censoring_rate >= 0.0 && censoring_rate < 1.0))
        throw std::invalid_argument("censoring rate must be in [0, 1)");
}

namespace {

// Expected censored fraction under C ~ U(0, c): mean of min(T_i, c) / c.
double censored_fraction(const std::vector<double>& t, double c)
{
    double s = 0;
    for (double v : t)
        s += std::min(v, c) / c;
    return s / static_cast<double>(t.size());
}

}  // namespace

std::vector<SurvivalRecord> synth_survival(const FeatureTable& X, const CohortSpec& spec)
{
    spec.validate(X.rows(), X.cols());
    const std::size_t n = X.rows();

    std::vector<double> event_time(n), censor_u(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0;
        for (std::size_t j = 0; j < X.cols(); ++j) {
            const double v = X(i, j);
            if (is_missing(v))
                throw DataError("synth_survival: feature table has missing values");
            eta += spec.beta[j] * v;
        }
        Rng rng(derive_seed(spec.seed, i));
        event_time[i] = rng.exponential(spec.baseline_hazard * std::exp(eta));
        censor_u[i] = rng.uniform();
    }

    double c_max = std::numeric_limits<double>::infinity();
    if (spec.censoring_rate > 0.0) {
        double lo = 1e-12, hi = 1.0;
        while (censored_fraction(event_time, hi) > spec.censoring_rate)
            hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (censored_fraction(event_time, mid) > spec.censoring_rate)
                lo = mid;
            else
                hi = mid;
        }
        c_max = hi;
    }

    std::vector<SurvivalRecord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = c_max * censor_u[i];
        out[i].subject = X.subjects()[i];
        out[i].event = event_time[i] <= c;
        out[i].time = std::min(event_time[i], c);
    }
    return out;
}

FeatureTable synth_feature_table(std::size_t n, std::size_t p, std::uint64_t seed, const std::string& prefix)
{
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= p; ++j)
        names.push_back(prefix + std::to_string(j));
    FeatureTable t(names);
    Rng rng(seed);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : row)
            v = rng.normal();
        char id[32];
        std::snprintf(id, sizeof(id), "S%04zu", i + 1);
        t.add_row(id, row);
    }
    return t;
}

}  // namespace rdepth
