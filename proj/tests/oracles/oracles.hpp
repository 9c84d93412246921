#pragma once

// Independent reference implementations used only by tests. Each one is
// written the slow, obvious way and shares no helper code with the library,
// so agreement between the two is evidence rather than tautology.

#include <cstdint>
#include <string>
#include <vector>

#include "restorex/annotations.hpp"
#include "restorex/gradcam.hpp"
#include "restorex/tensor.hpp"

namespace restorex::oracles {

/// Grad-CAM by direct triple loop: per-channel mean gradient, weighted sum
/// of feature maps, ReLU. Row-major u*v output.
std::vector<double> gradcam_naive(const Tensor3& features, const Tensor3& gradients);

/// Bilinear sample of a row-major src_h x src_w grid at output pixel
/// (out_y, out_x) of an out_h x out_w grid, using the align-corners-false
/// convention with edge clamping.
double bilinear_naive(const std::vector<float>& src, std::uint32_t src_h, std::uint32_t src_w,
                      std::uint32_t out_h, std::uint32_t out_w, std::uint32_t out_y,
                      std::uint32_t out_x);

/// Fraction of total heat whose pixel center falls inside at least one box,
/// computed by rasterizing an explicit membership mask first.
double attention_fraction_naive(const std::vector<float>& heat, std::uint32_t height,
                                std::uint32_t width, const std::vector<BoundingBox>& boxes);

struct OracleDetection {
    std::string image_id;
    BoundingBox box;
    double score = 0.0;
};

struct OracleGt {
    std::string image_id;
    BoundingBox box;
};

/// Average precision by explicit recounting: for every score cut, rerun
/// greedy matching from scratch on the kept subset, then integrate the
/// monotone precision envelope over recall. Single-class scenes; callers
/// must keep scores distinct, since tie order is the fast path's contract,
/// not this one's.
double ap_bruteforce(const std::vector<OracleDetection>& detections,
                     const std::vector<OracleGt>& ground_truth, double iou_threshold);

/// True-positive flag per detection (input order) from one full greedy pass,
/// for cross-checking match_detections.
std::vector<bool> match_bruteforce(const std::vector<OracleDetection>& detections,
                                   const std::vector<OracleGt>& ground_truth,
                                   double iou_threshold);

} // namespace restorex::oracles
