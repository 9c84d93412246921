#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "restorex/annotations.hpp"
#include "restorex/tensor.hpp"

namespace restorex {

/// Per-channel neuron importance weights: the global average pool of the
/// gradients flowing back onto each feature map.
struct NeuronWeights {
    std::vector<double> values; // one per channel
};

/// Class-discriminative localization map at feature-map resolution. All
/// values are >= 0 (post-ReLU).
struct CamMap {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<float> values;

    float at(std::uint32_t y, std::uint32_t x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Max-normalized map with values in [0,1]. The max is exactly 1 unless the
/// source was identically zero, in which case is_blank is set.
struct HeatMap {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<float> values;
    bool is_blank = false;

    float at(std::uint32_t y, std::uint32_t x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// weights[c] = mean over all spatial positions of gradients[c,y,x].
NeuronWeights neuron_weights(const Tensor3& gradients);

/// Pre-ReLU combination sum_k weights[k] * features[k,y,x], row-major u*v.
/// Exposed separately so linearity can be checked before clamping.
std::vector<double> weighted_combination(const Tensor3& features, const NeuronWeights& weights);

/// ReLU of the weighted combination. Throws channel_mismatch when the
/// weight count differs from features.channels.
CamMap cam(const Tensor3& features, const NeuronWeights& weights);

/// Divide by the map maximum; an all-zero map stays zero and is flagged
/// blank. Idempotent.
HeatMap normalize(const CamMap& map);

/// Bilinear upsample to H x W. The source sample position for output pixel
/// i is (i + 0.5) * (src/dst) - 0.5, clamped to [0, src-1]. Throws
/// shrink_unsupported if either target dimension is smaller than the source.
HeatMap upsample(const HeatMap& map, std::uint32_t out_height, std::uint32_t out_width);

struct AttentionFraction {
    double fraction = 0.0; // heat inside the box union / total heat
    bool is_blank = false; // total heat was zero
};

/// Fraction of total heat lying inside the union of the boxes, with pixel
/// membership decided by the (x+0.5, y+0.5) center-in-box test (half-open
/// on the max edges). Boxes must lie within the map bounds.
AttentionFraction attention_in_box(const HeatMap& map, std::span<const BoundingBox> boxes);

} // namespace restorex
