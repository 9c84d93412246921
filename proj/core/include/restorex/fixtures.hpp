#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace restorex {

/// Recipe for a deterministic synthetic dataset: same spec, same bytes, on
/// every platform. When phi_targets is set, each stage's detections are
/// constructed with d in {0,1} so the measured stage quality lands within
/// 1/(2*n_images) of the target (exactly on it when target*n_images is
/// integral).
struct FixtureSpec {
    std::uint64_t seed = 42;
    int n_images = 10;
    int n_stages = 3;
    std::vector<std::string> classes; // default: car, bus, truck, motorcycle, person, bicycle
    std::vector<double> phi_targets;  // empty, or one target in [0,1] per stage
    std::uint32_t tensor_channels = 4;
    std::uint32_t tensor_height = 8;
    std::uint32_t tensor_width = 8;
    int image_width = 64;
    int image_height = 48;
    bool with_tensors = true;
    bool with_images = true;
};

struct FixtureResult {
    std::filesystem::path manifest_path;
    std::filesystem::path similarity_path;
};

/// Write the full fixture tree under out_dir: manifest.json,
/// similarity.json, and per-stage detections/ground-truth documents plus
/// attention tensors and input/restored PNGs. Generation is single-threaded
/// and ordered so identical specs produce byte-identical trees.
FixtureResult generate_fixtures(const FixtureSpec& spec, const std::filesystem::path& out_dir);

} // namespace restorex
