#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restorex/detection_eval.hpp"
#include "restorex/gradcam.hpp"
#include "restorex/image.hpp"
#include "restorex/provenance.hpp"
#include "restorex/quality.hpp"

namespace restorex {

/// Color for a heat value in [0,1]: piecewise-linear blue (0,0,255) at 0,
/// green (0,255,0) at 0.5, red (255,0,0) at 1. Channels in 0..255.
struct Rgb {
    double r = 0;
    double g = 0;
    double b = 0;
};

Rgb heat_color(double t);

/// Alpha-blend the colormapped heatmap over the image:
/// out = (1-alpha)*image + alpha*color(heat), quantized round-half-up.
/// The heatmap must already be at image resolution.
Image8 render_overlay(const Image8& image, const HeatMap& heat, double alpha);

/// One table row: a stage or noise level.
struct RunReportRow {
    std::string label;
    std::map<std::string, ApReport::ClassStats> stats;
    double map = 0.0;
    std::optional<double> phi;
    std::optional<double> delta_phi;
};

/// A full technique report in the shape of a per-stage AP table: one header
/// row of classes plus mAP, one row per stage/noise level, with raw floats
/// preserved next to the integer display values.
struct RunReport {
    std::string technique;
    std::vector<std::string> classes; // column order
    std::vector<RunReportRow> rows;
    std::optional<ImprovementSummary> improvement;
    Provenance provenance;
};

std::string render_markdown(const RunReport& report);
std::string render_run_report_json(const RunReport& report);

/// The provenance block alone, as a JSON object. For embedding in documents
/// whose outer schema lives elsewhere (phi, psnr).
std::string render_provenance_json(const Provenance& prov);

/// Single-run eval JSON:
/// {"classes":{"car":{"ap":f,"tp":n,"fp":n,"gt":n},...},"map":f,
///  "display":{"car":int,...,"map":int},"provenance":{...}}
std::string render_eval_json(const ApReport& report, const Provenance& prov);

/// Read an eval JSON back (class order taken from the document).
ApReport parse_eval_report(std::string_view json_text);

/// Monitor output:
/// {"pairing":str,"stages":[{"id":int,"n":int,"phi":f,"decision":str}],
///  "deltas":[f,...],"rollback_to":int?,"provenance":{...}}
std::string render_trajectory_json(const Trajectory& trajectory, PairingMode mode,
                                   const Provenance& prov);

} // namespace restorex
