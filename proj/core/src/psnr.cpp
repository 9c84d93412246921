#include "restorex/psnr.hpp"

#include <cmath>
#include <limits>

#include "restorex/errors.hpp"

namespace restorex {

double psnr(const Image8& a, const Image8& b) {
    if (a.width != b.width || a.height != b.height)
        throw Error(errc::dim_mismatch, "images differ in size");
    if (a.pixels.size() != b.pixels.size() || a.pixels.empty())
        throw Error(errc::dim_mismatch, "image buffers do not match");

    double sum_sq = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        sum_sq += d * d;
    }
    if (sum_sq == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sum_sq / static_cast<double>(a.pixels.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

} // namespace restorex
