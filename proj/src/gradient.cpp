#include "rdepth/gradient.hpp"

#include <string>

namespace rdepth {

Volume gradient(const Volume& vol, Axis axis)
{
    const int a = static_cast<int>(axis);
    const auto& d = vol.dims();
    const std::size_t n = d[a];
    if (n < 2)
        throw std::invalid_argument("gradient needs at least two voxels along axis " + std::to_string(a));

    const double h = vol.spacing()[a];
    const std::size_t stride = a == 0 ? 1 : a == 1 ? d.nx : d.nx * d.ny;
    Volume out(vol.grid());
    const auto src = vol.data();
    auto dst = out.data();

    for (std::size_t i = 0; i < vol.size(); ++i) {
        const std::size_t pos = (i / stride) % n;
        if (pos == 0)
            dst[i] = (src[i + stride] - src[i]) / h;
        else if (pos == n - 1)
            dst[i] = (src[i] - src[i - stride]) / h;
        else
            dst[i] = (src[i + stride] - src[i - stride]) / (2.0 * h);
    }
    return out;
}

}  // namespace rdepth
