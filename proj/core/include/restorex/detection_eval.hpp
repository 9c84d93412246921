#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restorex/annotations.hpp"
#include "restorex/similarity.hpp"

namespace restorex {

/// Intersection-over-union of two corner-form boxes; 0 when disjoint.
double iou(const BoundingBox& a, const BoundingBox& b);

/// One ranked detection after matching.
struct MatchedDetection {
    std::string image_id;
    std::string label;   // normalized raw label
    double score = 0.0;
    double match_iou = 0.0;              // IoU with the matched ground truth, 0 if none
    std::optional<std::size_t> matched_gt; // index into the class's ground-truth list
    bool true_positive = false;
};

/// Matching outcome for one class bucket: detections sorted by descending
/// score (ties by higher static IoU, then image id, then input order), each
/// ground truth matched at most once.
struct ClassMatches {
    std::string class_name;
    std::vector<MatchedDetection> detections;
    int gt_count = 0;
};

struct MatchSet {
    std::map<std::string, ClassMatches> per_class; // keyed by class bucket
};

/// Greedy per-class matching. Labels are normalized and folded through the
/// similarity table's canonical classes before bucketing; detections match
/// only ground truth of the same bucket in the same image, at IoU >=
/// iou_threshold, highest IoU first.
MatchSet match_detections(const DetectionsDoc& detections, const GroundTruthDoc& ground_truth,
                          double iou_threshold, const SimilarityTable& table);

enum class ApMode { all_point, eleven_point };

const char* ap_mode_name(ApMode mode) noexcept;
ApMode parse_ap_mode(std::string_view name);

/// Area under the monotone (interpolated) precision-recall curve. The
/// default is the all-point method; eleven_point averages interpolated
/// precision at recalls {0, 0.1, ..., 1.0}. A class with no ground truth
/// scores 0 regardless of detections.
double average_precision(const ClassMatches& matches, ApMode mode = ApMode::all_point);

/// Arithmetic mean of AP over the configured class list; classes missing
/// from the map count as 0. Throws empty_class_list.
double mean_ap(const std::vector<std::string>& classes,
               const std::map<std::string, double>& per_class_ap);

/// Round half-up to an integer percentage, e.g. 0.0183... -> 2.
int display_percent(double fraction);

struct ApReport {
    struct ClassStats {
        double ap = 0.0;
        int tp = 0;
        int fp = 0;
        int gt = 0;
    };
    std::vector<std::string> classes; // report column order
    std::map<std::string, ClassStats> stats;
    double map = 0.0;
};

struct EvalOptions {
    double iou_threshold = 0.5;
    ApMode ap_mode = ApMode::all_point;
    /// Fixed class list (zero-ground-truth classes included at AP 0). When
    /// absent, the list is every class with ground truth, sorted.
    std::optional<std::vector<std::string>> classes;
};

/// Full evaluation: match, per-class AP, mAP.
ApReport evaluate_detections(const DetectionsDoc& detections, const GroundTruthDoc& ground_truth,
                             const SimilarityTable& table, const EvalOptions& options);

} // namespace restorex
