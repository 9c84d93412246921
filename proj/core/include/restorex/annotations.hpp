#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace restorex {

/// Corner-form box in pixel coordinates. Zero-area boxes are rejected at
/// parse time.
struct BoundingBox {
    double x_min = 0;
    double y_min = 0;
    double x_max = 0;
    double y_max = 0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }

    bool operator==(const BoundingBox&) const = default;
};

/// Throws box_error unless 0 <= min < max on both axes and all coords are
/// finite.
void validate_box(const BoundingBox& box);

/// One detector output. `label` is the raw predicted label; `explain_prob`
/// is the explanation probability the exporting classifier assigned to its
/// prediction, when available.
struct Detection {
    std::string image_id;
    BoundingBox box;
    std::string label;
    double score = 0.0;                 // detector confidence in [0,1]
    std::optional<double> explain_prob; // in [0,1] when present
};

struct GroundTruthObject {
    std::string image_id;
    BoundingBox box;
    std::string label;
    bool primary = false; // at most one per image
};

struct DetectionsDoc {
    struct Image {
        std::string id;
        int width = 0;
        int height = 0;
        std::vector<Detection> detections;
    };
    std::vector<Image> images; // document order preserved
};

struct GroundTruthDoc {
    struct Image {
        std::string id;
        int width = 0;
        int height = 0;
        std::vector<GroundTruthObject> objects;
    };
    std::vector<Image> images;
};

/// Parse a detections document:
///   {"images":[{"id":str,"width":int,"height":int,
///     "detections":[{"box":[x0,y0,x1,y1],"label":str,"score":f,"explain_prob":f?}]}]}
/// Throws schema_error / range_error / box_error.
DetectionsDoc parse_detections(std::string_view text);

/// Same shape with "objects":[{"box":[...],"label":str,"primary":bool?}].
/// Additionally throws primary_conflict if two objects in one image carry
/// the primary flag.
GroundTruthDoc parse_ground_truth(std::string_view text);

DetectionsDoc load_detections_file(const std::string& path);
GroundTruthDoc load_ground_truth_file(const std::string& path);

} // namespace restorex
