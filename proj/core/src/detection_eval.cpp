#include "restorex/detection_eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "restorex/errors.hpp"

namespace restorex {

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

const char* ap_mode_name(ApMode mode) noexcept {
    return mode == ApMode::all_point ? "all_point" : "eleven_point";
}

ApMode parse_ap_mode(std::string_view name) {
    if (name == "all_point") return ApMode::all_point;
    if (name == "eleven_point") return ApMode::eleven_point;
    throw Error(errc::usage_error, "ap mode must be 'all_point' or 'eleven_point', got '" + std::string(name) + "'");
}

namespace {

struct GtRef {
    std::string image_id;
    BoundingBox box;
    bool matched = false;
};

struct DetRef {
    std::string image_id;
    std::string label;
    BoundingBox box;
    double score = 0.0;
    double static_iou = 0.0; // best IoU vs any same-class gt in the image, for tie-breaking
    std::size_t input_order = 0;
};

std::string bucket_of(const std::string& raw_label, const SimilarityTable& table) {
    const std::string norm = normalize_label(raw_label);
    if (auto head = table.canonical_class(norm)) return *head;
    return norm; // labels outside the table form their own bucket
}

} // namespace

MatchSet match_detections(const DetectionsDoc& detections, const GroundTruthDoc& ground_truth,
                          double iou_threshold, const SimilarityTable& table) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
        throw Error(errc::range_error, "iou threshold must be in (0,1)");

    // Ground truth, bucketed by canonical class.
    std::map<std::string, std::vector<GtRef>> gts_by_class;
    for (const auto& image : ground_truth.images)
        for (const auto& obj : image.objects)
            gts_by_class[bucket_of(obj.label, table)].push_back({obj.image_id, obj.box, false});

    std::map<std::string, std::vector<DetRef>> dets_by_class;
    std::size_t order = 0;
    for (const auto& image : detections.images) {
        for (const auto& det : image.detections) {
            const std::string cls = bucket_of(det.label, table);
            dets_by_class[cls].push_back(
                {det.image_id, normalize_label(det.label), det.box, det.score, 0.0, order++});
        }
    }

    MatchSet result;
    // Emit a bucket for every class seen on either side.
    for (const auto& [cls, gts] : gts_by_class) {
        result.per_class[cls].class_name = cls;
        result.per_class[cls].gt_count = static_cast<int>(gts.size());
    }
    for (const auto& [cls, dets] : dets_by_class) result.per_class[cls].class_name = cls;

    for (auto& [cls, out] : result.per_class) {
        auto dets_it = dets_by_class.find(cls);
        if (dets_it == dets_by_class.end()) continue;
        std::vector<DetRef>& dets = dets_it->second;
        std::vector<GtRef> gts; // local copy carries the matched flags
        if (auto git = gts_by_class.find(cls); git != gts_by_class.end()) gts = git->second;

        for (DetRef& det : dets) {
            for (const GtRef& gt : gts)
                if (gt.image_id == det.image_id) det.static_iou = std::max(det.static_iou, iou(det.box, gt.box));
        }
        // Descending score; ties by higher static IoU, then image id, then
        // input order, so results are bit-reproducible.
        std::sort(dets.begin(), dets.end(), [](const DetRef& a, const DetRef& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.static_iou != b.static_iou) return a.static_iou > b.static_iou;
            if (a.image_id != b.image_id) return a.image_id < b.image_id;
            return a.input_order < b.input_order;
        });

        for (const DetRef& det : dets) {
            double best_iou = 0.0;
            std::size_t best_gt = gts.size();
            for (std::size_t g = 0; g < gts.size(); ++g) {
                if (gts[g].matched || gts[g].image_id != det.image_id) continue;
                const double overlap = iou(det.box, gts[g].box);
                if (overlap > best_iou) { // ties keep the earliest gt
                    best_iou = overlap;
                    best_gt = g;
                }
            }
            MatchedDetection matched;
            matched.image_id = det.image_id;
            matched.label = det.label;
            matched.score = det.score;
            if (best_gt < gts.size() && best_iou >= iou_threshold) {
                gts[best_gt].matched = true;
                matched.matched_gt = best_gt;
                matched.match_iou = best_iou;
                matched.true_positive = true;
            }
            out.detections.push_back(std::move(matched));
        }
    }
    return result;
}

double average_precision(const ClassMatches& matches, ApMode mode) {
    if (matches.gt_count <= 0) return 0.0;

    const std::size_t n = matches.detections.size();
    std::vector<double> recall(n), precision(n);
    int tp = 0, fp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        matches.detections[i].true_positive ? ++tp : ++fp;
        recall[i] = static_cast<double>(tp) / matches.gt_count;
        precision[i] = static_cast<double>(tp) / (tp + fp);
    }

    // Monotone envelope: interpolated precision at rank i is the max
    // precision at any recall >= recall[i].
    std::vector<double> interp(n);
    double running = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        running = std::max(running, precision[i]);
        interp[i] = running;
    }

    if (mode == ApMode::eleven_point) {
        double sum = 0.0;
        for (int step = 0; step <= 10; ++step) {
            const double r = step / 10.0;
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (recall[i] >= r) {
                    best = interp[i];
                    break;
                }
            }
            sum += best;
        }
        return sum / 11.0;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (recall[i] > prev_recall) {
            ap += (recall[i] - prev_recall) * interp[i];
            prev_recall = recall[i];
        }
    }
    return ap;
}

double mean_ap(const std::vector<std::string>& classes,
               const std::map<std::string, double>& per_class_ap) {
    if (classes.empty()) throw Error(errc::empty_class_list, "mAP needs at least one class");
    double sum = 0.0;
    for (const std::string& cls : classes) {
        auto it = per_class_ap.find(cls);
        if (it != per_class_ap.end()) sum += it->second;
    }
    return sum / static_cast<double>(classes.size());
}

int display_percent(double fraction) {
    return static_cast<int>(std::floor(fraction * 100.0 + 0.5));
}

ApReport evaluate_detections(const DetectionsDoc& detections, const GroundTruthDoc& ground_truth,
                             const SimilarityTable& table, const EvalOptions& options) {
    const MatchSet matches = match_detections(detections, ground_truth, options.iou_threshold, table);

    ApReport report;
    if (options.classes) {
        std::set<std::string> seen;
        for (const std::string& raw : *options.classes) {
            std::string cls = normalize_label(raw);
            if (auto head = table.canonical_class(cls)) cls = *head;
            if (!seen.insert(cls).second)
                throw Error(errc::usage_error, "class '" + cls + "' listed twice");
            report.classes.push_back(std::move(cls));
        }
    } else {
        for (const auto& [cls, cm] : matches.per_class)
            if (cm.gt_count > 0) report.classes.push_back(cls); // std::map iterates sorted
    }
    if (report.classes.empty())
        throw Error(errc::empty_class_list, "no classes with ground truth and none configured");

    std::map<std::string, double> ap_by_class;
    for (const std::string& cls : report.classes) {
        ApReport::ClassStats stats;
        auto it = matches.per_class.find(cls);
        if (it != matches.per_class.end()) {
            stats.ap = average_precision(it->second, options.ap_mode);
            stats.gt = it->second.gt_count;
            for (const MatchedDetection& det : it->second.detections)
                det.true_positive ? ++stats.tp : ++stats.fp;
        }
        ap_by_class[cls] = stats.ap;
        report.stats[cls] = stats;
    }
    report.map = mean_ap(report.classes, ap_by_class);
    return report;
}

} // namespace restorex
