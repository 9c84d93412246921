#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace restorex {

/// One monitored training stage: a contiguous, inclusive epoch range plus
/// the files produced while it ran.
struct StageEntry {
    int id = 0;
    int epoch_first = 0;
    int epoch_last = 0;
    std::filesystem::path detections_path;
    std::filesystem::path ground_truth_path;
    std::optional<std::filesystem::path> attention_dir; // <image_id>.features.rxt / .gradients.rxt pairs
    std::optional<std::filesystem::path> restored_dir;
    std::optional<std::filesystem::path> input_dir;
};

struct StageManifest {
    std::vector<StageEntry> stages; // ids strictly increasing, epoch ranges ordered
};

/// Parse {"stages":[{"id":int,"epoch_range":[first,last],"detections":path,
/// "ground_truth":path,"attention_dir":path?,"restored_dir":path?,"input_dir":path?}]}.
/// Throws stage_order_error when ids are not strictly increasing and
/// epoch_overlap_error when ranges overlap or run backwards across stages.
StageManifest parse_manifest(std::string_view text);

/// Read and parse a manifest file; relative paths inside it are resolved
/// against the manifest's own directory.
StageManifest load_manifest_file(const std::filesystem::path& path);

} // namespace restorex
