#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace rdepth {

/// Seeded generator with distributions written out explicitly, so streams
/// are identical across standard library implementations (std::mt19937_64
/// output is fully specified; the std:: distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform()
    {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0)
                return u;
        }
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller; the spare deviate is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        for (;;) {
            const std::uint64_t v = engine_();
            if (v < limit)
                return v % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0;
    bool has_spare_ = false;
};

/// Independent child seed for stream `index` (SplitMix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace rdepth
