#pragma once

#include "restorex/image.hpp"

namespace restorex {

/// Peak signal-to-noise ratio in decibels: 10*log10(255^2 / MSE) with the
/// MSE taken over all pixels and channels. Identical images return
/// +infinity (rendered as "inf" by the CLI). Throws dim_mismatch when the
/// images differ in size.
double psnr(const Image8& a, const Image8& b);

} // namespace restorex
