#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace restorex::oracles {
namespace {

double iou_naive(const BoundingBox& a, const BoundingBox& b) {
    double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    double inter = ix * iy;
    double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
    double area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
    double uni = area_a + area_b - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

// One greedy pass over detections sorted by descending score. Assumes
// distinct scores; returns per-input-order TP flags.
std::vector<bool> greedy_tp(const std::vector<OracleDetection>& detections,
                            const std::vector<OracleGt>& ground_truth, double iou_threshold) {
    std::vector<std::size_t> order(detections.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return detections[l].score > detections[r].score;
    });

    std::vector<bool> used(ground_truth.size(), false);
    std::vector<bool> tp(detections.size(), false);
    for (std::size_t idx : order) {
        const auto& det = detections[idx];
        double best_iou = 0.0;
        std::size_t best = ground_truth.size();
        for (std::size_t j = 0; j < ground_truth.size(); ++j) {
            if (used[j] || ground_truth[j].image_id != det.image_id) continue;
            double v = iou_naive(det.box, ground_truth[j].box);
            if (v >= iou_threshold && v > best_iou) {
                best_iou = v;
                best = j;
            }
        }
        if (best < ground_truth.size()) {
            used[best] = true;
            tp[idx] = true;
        }
    }
    return tp;
}

} // namespace

std::vector<double> gradcam_naive(const Tensor3& features, const Tensor3& gradients) {
    std::size_t height = features.height;
    std::size_t width = features.width;
    std::vector<double> out(height * width, 0.0);
    for (std::size_t c = 0; c < features.channels; ++c) {
        double grad_sum = 0.0;
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x)
                grad_sum += gradients.data[(c * height + y) * width + x];
        double weight = grad_sum / static_cast<double>(height * width);
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x)
                out[y * width + x] += weight * features.data[(c * height + y) * width + x];
    }
    for (double& v : out)
        if (v < 0.0) v = 0.0;
    return out;
}

double bilinear_naive(const std::vector<float>& src, std::uint32_t src_h, std::uint32_t src_w,
                      std::uint32_t out_h, std::uint32_t out_w, std::uint32_t out_y,
                      std::uint32_t out_x) {
    auto source_pos = [](std::uint32_t i, std::uint32_t src_n, std::uint32_t out_n) {
        double p = (i + 0.5) * (static_cast<double>(src_n) / out_n) - 0.5;
        if (p < 0.0) p = 0.0;
        if (p > src_n - 1.0) p = src_n - 1.0;
        return p;
    };
    double sy = source_pos(out_y, src_h, out_h);
    double sx = source_pos(out_x, src_w, out_w);
    auto y0 = static_cast<std::uint32_t>(sy);
    auto x0 = static_cast<std::uint32_t>(sx);
    std::uint32_t y1 = std::min(y0 + 1, src_h - 1);
    std::uint32_t x1 = std::min(x0 + 1, src_w - 1);
    double fy = sy - y0;
    double fx = sx - x0;
    double top = (1.0 - fx) * src[y0 * src_w + x0] + fx * src[y0 * src_w + x1];
    double bottom = (1.0 - fx) * src[y1 * src_w + x0] + fx * src[y1 * src_w + x1];
    return (1.0 - fy) * top + fy * bottom;
}

double attention_fraction_naive(const std::vector<float>& heat, std::uint32_t height,
                                std::uint32_t width, const std::vector<BoundingBox>& boxes) {
    std::vector<char> mask(static_cast<std::size_t>(height) * width, 0);
    for (const auto& box : boxes)
        for (std::uint32_t y = 0; y < height; ++y)
            for (std::uint32_t x = 0; x < width; ++x) {
                double cx = x + 0.5;
                double cy = y + 0.5;
                if (cx >= box.x_min && cx < box.x_max && cy >= box.y_min && cy < box.y_max)
                    mask[static_cast<std::size_t>(y) * width + x] = 1;
            }
    double total = 0.0;
    double inside = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        total += heat[i];
        if (mask[i]) inside += heat[i];
    }
    return total > 0.0 ? inside / total : 0.0;
}

double ap_bruteforce(const std::vector<OracleDetection>& detections,
                     const std::vector<OracleGt>& ground_truth, double iou_threshold) {
    if (ground_truth.empty()) return 0.0;

    std::vector<double> cuts;
    for (const auto& det : detections) cuts.push_back(det.score);
    std::sort(cuts.begin(), cuts.end(), std::greater<>());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    struct Point {
        double recall;
        double precision;
    };
    std::vector<Point> points;
    for (double cut : cuts) {
        std::vector<OracleDetection> subset;
        for (const auto& det : detections)
            if (det.score >= cut) subset.push_back(det);
        auto tp_flags = greedy_tp(subset, ground_truth, iou_threshold);
        std::size_t tp = 0;
        for (bool flag : tp_flags) tp += flag ? 1 : 0;
        points.push_back({static_cast<double>(tp) / static_cast<double>(ground_truth.size()),
                          static_cast<double>(tp) / static_cast<double>(subset.size())});
    }

    std::vector<double> recalls;
    for (const auto& p : points) recalls.push_back(p.recall);
    std::sort(recalls.begin(), recalls.end());
    recalls.erase(std::unique(recalls.begin(), recalls.end()), recalls.end());

    double ap = 0.0;
    double prev = 0.0;
    for (double r : recalls) {
        if (r <= prev) continue;
        double pmax = 0.0;
        for (const auto& p : points)
            if (p.recall >= r) pmax = std::max(pmax, p.precision);
        ap += (r - prev) * pmax;
        prev = r;
    }
    return ap;
}

std::vector<bool> match_bruteforce(const std::vector<OracleDetection>& detections,
                                   const std::vector<OracleGt>& ground_truth,
                                   double iou_threshold) {
    return greedy_tp(detections, ground_truth, iou_threshold);
}

} // namespace restorex::oracles
