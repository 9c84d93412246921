#include "restorex/quality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "restorex/detection_eval.hpp"
#include "restorex/errors.hpp"
#include "parallel.hpp"

namespace restorex {

const char* decision_name(Decision decision) noexcept {
    switch (decision) {
        case Decision::Continue: return "continue";
        case Decision::Flag: return "flag";
        case Decision::Stop: return "stop";
    }
    return "continue";
}

GuidancePolicy parse_policy(std::string_view json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(errc::schema_error, "policy must be a JSON object");
    GuidancePolicy policy;
    if (doc.contains("drop_tolerance")) {
        if (!doc["drop_tolerance"].is_number()) throw Error(errc::schema_error, "drop_tolerance must be a number");
        policy.drop_tolerance = doc["drop_tolerance"].get<double>();
    }
    if (doc.contains("patience")) {
        if (!doc["patience"].is_number_integer()) throw Error(errc::schema_error, "patience must be an integer");
        policy.patience = doc["patience"].get<int>();
    }
    if (doc.contains("min_phi")) {
        if (!doc["min_phi"].is_number()) throw Error(errc::schema_error, "min_phi must be a number");
        policy.min_phi = doc["min_phi"].get<double>();
    }
    if (policy.drop_tolerance < 0.0 || policy.drop_tolerance > 1.0)
        throw Error(errc::range_error, "drop_tolerance must be in [0,1]");
    if (policy.patience < 1) throw Error(errc::range_error, "patience must be >= 1");
    if (policy.min_phi < 0.0 || policy.min_phi > 1.0)
        throw Error(errc::range_error, "min_phi must be in [0,1]");
    return policy;
}

GuidancePolicy load_policy_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_policy(ss.str());
}

double phi(std::span<const SampleScore> samples) {
    if (samples.empty()) throw Error(errc::empty_stage, "stage has no samples");
    std::vector<double> terms;
    terms.reserve(samples.size());
    for (const SampleScore& sample : samples) {
        if (sample.s != 0 && sample.s != 1)
            throw Error(errc::range_error, "similarity must be 0 or 1");
        if (!(sample.d >= 0.0 && sample.d <= 1.0))
            throw Error(errc::range_error, "explanation probability outside [0,1]");
        terms.push_back(sample.term());
    }
    // Summing in sorted order makes phi independent of sample order.
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum / static_cast<double>(samples.size());
}

StageQuality stage_quality(int stage_id, std::span<const SampleScore> samples) {
    return {stage_id, samples.size(), phi(samples)};
}

const char* pairing_mode_name(PairingMode mode) noexcept {
    return mode == PairingMode::primary_object ? "primary_object" : "per_detection";
}

PairingMode parse_pairing_mode(std::string_view name) {
    if (name == "primary_object") return PairingMode::primary_object;
    if (name == "per_detection") return PairingMode::per_detection;
    throw Error(errc::usage_error,
                "pairing mode must be 'primary_object' or 'per_detection', got '" + std::string(name) + "'");
}

namespace {

double require_explain_prob(const Detection& det) {
    if (!det.explain_prob)
        throw Error(errc::missing_explain_prob,
                    "detection '" + det.label + "' in image '" + det.image_id + "' has no explain_prob");
    return *det.explain_prob;
}

// Primary object: flagged, else largest area (earliest on ties).
const GroundTruthObject& primary_object(const GroundTruthDoc::Image& image) {
    for (const GroundTruthObject& obj : image.objects)
        if (obj.primary) return obj;
    const GroundTruthObject* best = &image.objects.front();
    for (const GroundTruthObject& obj : image.objects)
        if (obj.box.area() > best->box.area()) best = &obj;
    return *best;
}

std::vector<SampleScore> build_primary_object_samples(const DetectionsDoc& detections,
                                                      const GroundTruthDoc& ground_truth,
                                                      const SimilarityTable& table) {
    std::map<std::string, const GroundTruthDoc::Image*> gt_by_id;
    for (const auto& image : ground_truth.images) gt_by_id[image.id] = &image;

    std::vector<SampleScore> samples;
    samples.reserve(detections.images.size());
    for (const auto& image : detections.images) {
        auto it = gt_by_id.find(image.id);
        if (it == gt_by_id.end() || it->second->objects.empty())
            throw Error(errc::no_ground_truth, "image '" + image.id + "' has no ground-truth objects");

        SampleScore sample;
        sample.image_id = image.id;
        sample.actual = normalize_label(primary_object(*it->second).label);

        if (!image.detections.empty()) {
            // Image-level verdict: the detection the explainer was most
            // confident about. Ties go to the higher detector score, then
            // input order.
            const Detection* verdict = nullptr;
            double verdict_prob = -1.0;
            for (const Detection& det : image.detections) {
                const double prob = require_explain_prob(det);
                if (prob > verdict_prob || (prob == verdict_prob && det.score > verdict->score)) {
                    verdict = &det;
                    verdict_prob = prob;
                }
            }
            sample.predicted = normalize_label(verdict->label);
            sample.d = verdict_prob;
            sample.s = table.similarity(sample.predicted, sample.actual);
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<SampleScore> build_per_detection_samples(const DetectionsDoc& detections,
                                                     const GroundTruthDoc& ground_truth,
                                                     const SimilarityTable& table) {
    constexpr double kMatchIou = 0.5;

    std::map<std::string, const GroundTruthDoc::Image*> gt_by_id;
    for (const auto& image : ground_truth.images) gt_by_id[image.id] = &image;

    std::vector<SampleScore> samples;
    for (const auto& image : detections.images) {
        // Match by geometry only; the label enters through S(p,a).
        std::vector<const Detection*> ranked;
        for (const Detection& det : image.detections) ranked.push_back(&det);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const Detection* a, const Detection* b) { return a->score > b->score; });

        std::vector<bool> gt_used;
        const GroundTruthDoc::Image* gt_image = nullptr;
        if (auto it = gt_by_id.find(image.id); it != gt_by_id.end()) {
            gt_image = it->second;
            gt_used.assign(gt_image->objects.size(), false);
        }

        std::map<const Detection*, const GroundTruthObject*> match;
        for (const Detection* det : ranked) {
            if (!gt_image) break;
            double best_iou = 0.0;
            std::size_t best = gt_image->objects.size();
            for (std::size_t g = 0; g < gt_image->objects.size(); ++g) {
                if (gt_used[g]) continue;
                const double overlap = iou(det->box, gt_image->objects[g].box);
                if (overlap > best_iou) {
                    best_iou = overlap;
                    best = g;
                }
            }
            if (best < gt_image->objects.size() && best_iou >= kMatchIou) {
                gt_used[best] = true;
                match[det] = &gt_image->objects[best];
            }
        }

        // Emit samples in document order.
        for (const Detection& det : image.detections) {
            SampleScore sample;
            sample.image_id = image.id;
            sample.predicted = normalize_label(det.label);
            sample.d = require_explain_prob(det);
            if (auto it = match.find(&det); it != match.end()) {
                sample.actual = normalize_label(it->second->label);
                sample.s = table.similarity(sample.predicted, sample.actual);
            }
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

} // namespace

std::vector<SampleScore> build_samples(const DetectionsDoc& detections,
                                       const GroundTruthDoc& ground_truth,
                                       const SimilarityTable& table, PairingMode mode) {
    return mode == PairingMode::primary_object
               ? build_primary_object_samples(detections, ground_truth, table)
               : build_per_detection_samples(detections, ground_truth, table);
}

std::vector<Decision> guidance_decisions(const std::vector<double>& phis, const GuidancePolicy& policy) {
    std::vector<Decision> decisions(phis.size(), Decision::Continue);
    int consecutive_drops = 0;
    for (std::size_t i = 0; i < phis.size(); ++i) {
        if (i > 0) {
            const double delta = phis[i] - phis[i - 1];
            consecutive_drops = (delta < -policy.drop_tolerance) ? consecutive_drops + 1 : 0;
        }
        if (consecutive_drops >= policy.patience || phis[i] < policy.min_phi)
            decisions[i] = Decision::Stop;
        else if (consecutive_drops >= 1)
            decisions[i] = Decision::Flag;
    }
    return decisions;
}

bool Trajectory::stop_recommended() const {
    return std::any_of(stages.begin(), stages.end(),
                       [](const StageOutcome& s) { return s.decision == Decision::Stop; });
}

Trajectory evaluate_trajectory(const std::vector<StageQuality>& stages, const GuidancePolicy& policy) {
    if (stages.empty()) throw Error(errc::empty_stage, "trajectory needs at least one stage");

    Trajectory trajectory;
    std::vector<double> phis;
    phis.reserve(stages.size());
    for (const StageQuality& q : stages) phis.push_back(q.phi);

    const std::vector<Decision> decisions = guidance_decisions(phis, policy);
    for (std::size_t i = 0; i < stages.size(); ++i) {
        trajectory.stages.push_back({stages[i], decisions[i]});
        if (i > 0) trajectory.deltas.push_back(phis[i] - phis[i - 1]);
    }

    if (trajectory.stop_recommended()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < phis.size(); ++i)
            if (phis[i] > phis[best]) best = i;
        trajectory.rollback_to = stages[best].stage_id;
    }
    return trajectory;
}

Trajectory run_manifest(const StageManifest& manifest, const SimilarityTable& table,
                        const GuidancePolicy& policy, PairingMode mode, int threads) {
    std::vector<StageQuality> qualities(manifest.stages.size());
    detail::parallel_for(manifest.stages.size(), threads, [&](std::size_t i) {
        const StageEntry& stage = manifest.stages[i];
        try {
            const DetectionsDoc dets = load_detections_file(stage.detections_path.string());
            const GroundTruthDoc gts = load_ground_truth_file(stage.ground_truth_path.string());
            const std::vector<SampleScore> samples = build_samples(dets, gts, table, mode);
            qualities[i] = stage_quality(stage.id, samples);
        } catch (const Error& e) {
            throw Error(e.code(), "stage " + std::to_string(stage.id) + ": " + e.message());
        }
    });
    return evaluate_trajectory(qualities, policy);
}

ImprovementSummary improvement_summary(std::span<const double> before, std::span<const double> after) {
    if (before.empty() || before.size() != after.size())
        throw Error(errc::usage_error, "before/after must be nonempty lists of equal length");

    ImprovementSummary summary;
    double sum = 0.0;
    int defined = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        ImprovementSummary::Entry entry;
        entry.before = before[i];
        entry.after = after[i];
        if (before[i] > 0.0) {
            entry.percent = 100.0 * (after[i] - before[i]) / before[i];
            sum += *entry.percent;
            ++defined;
        } else {
            ++summary.undefined_count;
        }
        summary.entries.push_back(entry);
    }
    if (defined > 0) summary.mean_percent = sum / defined;
    return summary;
}

} // namespace restorex
