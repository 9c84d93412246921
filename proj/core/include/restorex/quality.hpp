#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "restorex/annotations.hpp"
#include "restorex/manifest.hpp"
#include "restorex/similarity.hpp"

namespace restorex {

/// One scored sample: the term S(p,a) * d that the stage quality averages.
struct SampleScore {
    std::string image_id;
    std::string predicted; // p, normalized; empty when there was no prediction
    std::string actual;    // a, normalized; empty for unmatched per-detection samples
    int s = 0;             // label similarity, 0 or 1
    double d = 0.0;        // explanation probability in [0,1]

    double term() const { return s * d; }
};

/// phi for one stage: mean over samples of S(p,a)*d.
struct StageQuality {
    int stage_id = 0;
    std::size_t n = 0;
    double phi = 0.0;
};

enum class Decision { Continue, Flag, Stop };

const char* decision_name(Decision decision) noexcept;

/// Thresholds for the continue/flag/stop guidance. A stage is flagged after
/// a single drop steeper than drop_tolerance, stopped after `patience`
/// consecutive such drops or when phi falls below min_phi.
struct GuidancePolicy {
    double drop_tolerance = 0.05;
    int patience = 2;
    double min_phi = 0.0;
};

/// Parse {"drop_tolerance":f,"patience":int,"min_phi":f}; all fields
/// optional, defaults above.
GuidancePolicy parse_policy(std::string_view json_text);
GuidancePolicy load_policy_file(const std::string& path);

/// Mean of the sample terms. The sum runs over the terms in sorted order so
/// the result is invariant under sample permutation, bit for bit. Throws
/// empty_stage for zero samples.
double phi(std::span<const SampleScore> samples);

StageQuality stage_quality(int stage_id, std::span<const SampleScore> samples);

enum class PairingMode { primary_object, per_detection };

const char* pairing_mode_name(PairingMode mode) noexcept;
PairingMode parse_pairing_mode(std::string_view name);

/// Construct the per-stage samples from parsed detection and ground-truth
/// documents.
///
/// primary_object: one sample per image in the detections document. p is
/// the label of the highest-explain_prob detection (the image-level
/// classifier verdict), a is the primary ground-truth label (flagged
/// object, else largest area), d is that explain_prob. Images with no
/// detections still produce a sample with d = 0, so N stays the number of
/// generated samples. Every image must have ground truth (no_ground_truth).
///
/// per_detection: one sample per detection. Detections are greedily matched
/// to ground-truth boxes at IoU >= 0.5 regardless of label (descending
/// score); matched samples take a from the matched object, unmatched ones
/// score s = 0.
///
/// Both modes require explain_prob on every detection
/// (missing_explain_prob).
std::vector<SampleScore> build_samples(const DetectionsDoc& detections,
                                       const GroundTruthDoc& ground_truth,
                                       const SimilarityTable& table, PairingMode mode);

/// Pure decision rule over a phi sequence; index i in the result is the
/// decision after stage i.
std::vector<Decision> guidance_decisions(const std::vector<double>& phis,
                                         const GuidancePolicy& policy);

struct StageOutcome {
    StageQuality quality;
    Decision decision = Decision::Continue;
};

struct Trajectory {
    std::vector<StageOutcome> stages;
    std::vector<double> deltas;      // deltas[i] = phi[i+1] - phi[i]
    std::optional<int> rollback_to;  // argmax-phi stage id, set when a stop occurred

    bool stop_recommended() const;
};

/// Deltas + decisions + rollback target from per-stage qualities.
Trajectory evaluate_trajectory(const std::vector<StageQuality>& stages, const GuidancePolicy& policy);

/// Load every stage in the manifest, score it, and run the guidance policy.
/// Stage loads are independent and run on up to `threads` workers; errors
/// are rethrown annotated with the offending stage id.
Trajectory run_manifest(const StageManifest& manifest, const SimilarityTable& table,
                        const GuidancePolicy& policy, PairingMode mode, int threads = 1);

/// Per-pair percent change of mAP (or any metric) plus the mean over pairs.
/// Pairs with a non-positive baseline are reported undefined and excluded
/// from the mean.
struct ImprovementSummary {
    struct Entry {
        double before = 0.0;
        double after = 0.0;
        std::optional<double> percent; // absent for zero/negative baselines
    };
    std::vector<Entry> entries;
    std::optional<double> mean_percent;
    int undefined_count = 0;
};

ImprovementSummary improvement_summary(std::span<const double> before, std::span<const double> after);

} // namespace restorex
