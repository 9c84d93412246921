#include "restorex/gradcam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "restorex/errors.hpp"

namespace restorex {

NeuronWeights neuron_weights(const Tensor3& gradients) {
    validate_tensor(gradients);
    const std::size_t plane = static_cast<std::size_t>(gradients.height) * gradients.width;
    NeuronWeights w;
    w.values.resize(gradients.channels);
    for (std::uint32_t c = 0; c < gradients.channels; ++c) {
        double sum = 0.0;
        const float* p = gradients.data.data() + static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) sum += p[i];
        w.values[c] = sum / static_cast<double>(plane);
    }
    return w;
}

std::vector<double> weighted_combination(const Tensor3& features, const NeuronWeights& weights) {
    validate_tensor(features);
    if (weights.values.size() != features.channels)
        throw Error(errc::channel_mismatch, std::to_string(weights.values.size()) + " weights for " +
                                                std::to_string(features.channels) + " channels");
    const std::size_t plane = static_cast<std::size_t>(features.height) * features.width;
    std::vector<double> out(plane, 0.0);
    for (std::uint32_t c = 0; c < features.channels; ++c) {
        const double w = weights.values[c];
        const float* p = features.data.data() + static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) out[i] += w * p[i];
    }
    return out;
}

CamMap cam(const Tensor3& features, const NeuronWeights& weights) {
    const std::vector<double> combined = weighted_combination(features, weights);
    CamMap map;
    map.height = features.height;
    map.width = features.width;
    map.values.resize(combined.size());
    for (std::size_t i = 0; i < combined.size(); ++i)
        map.values[i] = static_cast<float>(std::max(0.0, combined[i]));
    return map;
}

HeatMap normalize(const CamMap& map) {
    HeatMap out;
    out.height = map.height;
    out.width = map.width;
    out.values.resize(map.values.size());
    float max_value = 0.0f;
    for (float v : map.values) max_value = std::max(max_value, v);
    if (max_value > 0.0f) {
        for (std::size_t i = 0; i < map.values.size(); ++i) out.values[i] = map.values[i] / max_value;
    } else {
        out.is_blank = true;
    }
    return out;
}

HeatMap upsample(const HeatMap& map, std::uint32_t out_height, std::uint32_t out_width) {
    if (map.height == 0 || map.width == 0 || map.values.size() != static_cast<std::size_t>(map.height) * map.width)
        throw Error(errc::dim_mismatch, "heatmap buffer does not match its dims");
    if (out_height < map.height || out_width < map.width)
        throw Error(errc::shrink_unsupported, "target smaller than source; downsampling unsupported");

    HeatMap out;
    out.height = out_height;
    out.width = out_width;
    out.is_blank = map.is_blank;
    out.values.resize(static_cast<std::size_t>(out_height) * out_width);

    const double sy_scale = static_cast<double>(map.height) / out_height;
    const double sx_scale = static_cast<double>(map.width) / out_width;
    for (std::uint32_t i = 0; i < out_height; ++i) {
        double sy = (i + 0.5) * sy_scale - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(map.height - 1));
        const std::uint32_t y0 = static_cast<std::uint32_t>(sy);
        const std::uint32_t y1 = std::min(y0 + 1, map.height - 1);
        const double ty = sy - y0;
        for (std::uint32_t j = 0; j < out_width; ++j) {
            double sx = (j + 0.5) * sx_scale - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(map.width - 1));
            const std::uint32_t x0 = static_cast<std::uint32_t>(sx);
            const std::uint32_t x1 = std::min(x0 + 1, map.width - 1);
            const double tx = sx - x0;
            const double v = (1.0 - ty) * ((1.0 - tx) * map.at(y0, x0) + tx * map.at(y0, x1)) +
                             ty * ((1.0 - tx) * map.at(y1, x0) + tx * map.at(y1, x1));
            out.values[static_cast<std::size_t>(i) * out_width + j] =
                static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

AttentionFraction attention_in_box(const HeatMap& map, std::span<const BoundingBox> boxes) {
    for (const BoundingBox& box : boxes) {
        validate_box(box);
        if (box.x_max > map.width || box.y_max > map.height)
            throw Error(errc::box_out_of_bounds, "box exceeds map bounds");
    }

    double total = 0.0;
    double inside = 0.0;
    for (std::uint32_t y = 0; y < map.height; ++y) {
        const double cy = y + 0.5;
        for (std::uint32_t x = 0; x < map.width; ++x) {
            const double v = map.at(y, x);
            total += v;
            const double cx = x + 0.5;
            for (const BoundingBox& box : boxes) {
                if (cx >= box.x_min && cx < box.x_max && cy >= box.y_min && cy < box.y_max) {
                    inside += v; // union: count each pixel once
                    break;
                }
            }
        }
    }

    AttentionFraction result;
    if (total == 0.0) {
        result.is_blank = true;
        return result;
    }
    result.fraction = inside / total;
    return result;
}

} // namespace restorex
