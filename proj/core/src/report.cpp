#include "restorex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "restorex/errors.hpp"

namespace restorex {

namespace {

using nlohmann::ordered_json;

std::string format_float(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

ordered_json provenance_json(const Provenance& prov) {
    ordered_json j;
    j["tool"] = prov.tool;
    j["version"] = prov.version;
    j["flags"] = ordered_json::object();
    for (const auto& [flag, value] : prov.flags) j["flags"][flag] = value;
    j["inputs"] = ordered_json::object();
    for (const auto& [path, digest] : prov.inputs) j["inputs"][path] = digest;
    j["config_hash"] = prov.config_hash;
    if (prov.timestamp) j["timestamp"] = *prov.timestamp;
    return j;
}

ordered_json improvement_json(const ImprovementSummary& summary) {
    ordered_json j;
    j["pairs"] = ordered_json::array();
    for (const auto& entry : summary.entries) {
        ordered_json e;
        e["before"] = entry.before;
        e["after"] = entry.after;
        if (entry.percent)
            e["percent"] = *entry.percent;
        else
            e["percent"] = nullptr; // undefined: zero baseline
        j["pairs"].push_back(std::move(e));
    }
    if (summary.mean_percent)
        j["mean_percent"] = *summary.mean_percent;
    else
        j["mean_percent"] = nullptr;
    j["undefined_pairs"] = summary.undefined_count;
    return j;
}

} // namespace

Rgb heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    if (t <= 0.5) {
        const double s = t / 0.5;
        return {0.0, 255.0 * s, 255.0 * (1.0 - s)};
    }
    const double s = (t - 0.5) / 0.5;
    return {255.0 * s, 255.0 * (1.0 - s), 0.0};
}

Image8 render_overlay(const Image8& image, const HeatMap& heat, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(errc::range_error, "alpha outside [0,1]");
    if (heat.width != static_cast<std::uint32_t>(image.width) ||
        heat.height != static_cast<std::uint32_t>(image.height))
        throw Error(errc::dim_mismatch, "heatmap is not at image resolution");

    Image8 out = image;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const Rgb color = heat_color(heat.at(static_cast<std::uint32_t>(y), static_cast<std::uint32_t>(x)));
            const double channels[3] = {color.r, color.g, color.b};
            for (int c = 0; c < 3; ++c) {
                const double blended = (1.0 - alpha) * image.at(x, y, c) + alpha * channels[c];
                const double quantized = std::floor(blended + 0.5); // round half-up
                out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(quantized, 0.0, 255.0));
            }
        }
    }
    return out;
}

std::string render_markdown(const RunReport& report) {
    std::ostringstream out;
    out << "# " << report.technique << "\n\n";

    const bool any_phi = std::any_of(report.rows.begin(), report.rows.end(),
                                     [](const RunReportRow& r) { return r.phi.has_value(); });

    out << "| " << report.technique << " |";
    for (const std::string& cls : report.classes) out << " " << cls << " |";
    out << " mAP |";
    if (any_phi) out << " phi | dphi |";
    out << "\n|" << std::string(3, '-') << "|";
    for (std::size_t i = 0; i < report.classes.size() + 1; ++i) out << "---|";
    if (any_phi) out << "---|---|";
    out << "\n";

    for (const RunReportRow& row : report.rows) {
        out << "| " << row.label << " |";
        for (const std::string& cls : report.classes) {
            auto it = row.stats.find(cls);
            out << " " << (it != row.stats.end() ? display_percent(it->second.ap) : 0) << " |";
        }
        out << " " << display_percent(row.map) << " |";
        if (any_phi) {
            out << " " << (row.phi ? format_float(*row.phi, 4) : std::string()) << " |";
            out << " " << (row.delta_phi ? format_float(*row.delta_phi, 4) : std::string()) << " |";
        }
        out << "\n";
    }

    if (report.improvement) {
        out << "\n## mAP improvement\n\n";
        for (const auto& entry : report.improvement->entries) {
            out << "- " << format_float(entry.before, 4) << " -> " << format_float(entry.after, 4) << ": ";
            if (entry.percent)
                out << format_float(*entry.percent, 2) << "%\n";
            else
                out << "undefined (zero baseline)\n";
        }
        if (report.improvement->mean_percent)
            out << "\nMean improvement: " << format_float(*report.improvement->mean_percent, 2) << "%\n";
    }

    out << "\nconfig_hash: " << report.provenance.config_hash << "\n";
    return out.str();
}

std::string render_run_report_json(const RunReport& report) {
    ordered_json j;
    j["technique"] = report.technique;
    j["classes"] = report.classes;
    j["rows"] = ordered_json::array();
    for (const RunReportRow& row : report.rows) {
        ordered_json r;
        r["label"] = row.label;
        r["classes"] = ordered_json::object();
        for (const std::string& cls : report.classes) {
            auto it = row.stats.find(cls);
            const ApReport::ClassStats stats = it != row.stats.end() ? it->second : ApReport::ClassStats{};
            ordered_json c;
            c["ap"] = stats.ap;
            c["tp"] = stats.tp;
            c["fp"] = stats.fp;
            c["gt"] = stats.gt;
            r["classes"][cls] = std::move(c);
        }
        r["map"] = row.map;
        ordered_json display = ordered_json::object();
        for (const std::string& cls : report.classes) {
            auto it = row.stats.find(cls);
            display[cls] = display_percent(it != row.stats.end() ? it->second.ap : 0.0);
        }
        display["map"] = display_percent(row.map);
        r["display"] = std::move(display);
        if (row.phi) r["phi"] = *row.phi;
        if (row.delta_phi) r["delta_phi"] = *row.delta_phi;
        j["rows"].push_back(std::move(r));
    }
    if (report.improvement) j["improvement"] = improvement_json(*report.improvement);
    j["provenance"] = provenance_json(report.provenance);
    return j.dump(2) + "\n";
}

std::string render_provenance_json(const Provenance& prov) {
    return provenance_json(prov).dump(2) + "\n";
}

std::string render_eval_json(const ApReport& report, const Provenance& prov) {
    ordered_json j;
    j["classes"] = ordered_json::object();
    for (const std::string& cls : report.classes) {
        const ApReport::ClassStats& stats = report.stats.at(cls);
        ordered_json c;
        c["ap"] = stats.ap;
        c["tp"] = stats.tp;
        c["fp"] = stats.fp;
        c["gt"] = stats.gt;
        j["classes"][cls] = std::move(c);
    }
    j["map"] = report.map;
    ordered_json display = ordered_json::object();
    for (const std::string& cls : report.classes) display[cls] = display_percent(report.stats.at(cls).ap);
    display["map"] = display_percent(report.map);
    j["display"] = std::move(display);
    j["provenance"] = provenance_json(prov);
    return j.dump(2) + "\n";
}

ApReport parse_eval_report(std::string_view json_text) {
    ordered_json doc = ordered_json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("classes") || !doc["classes"].is_object() ||
        !doc.contains("map") || !doc["map"].is_number())
        throw Error(errc::schema_error, "not an eval report (need 'classes' object and 'map' number)");

    ApReport report;
    for (const auto& [cls, stats] : doc["classes"].items()) {
        if (!stats.is_object() || !stats.contains("ap") || !stats["ap"].is_number())
            throw Error(errc::schema_error, "class '" + cls + "' has no numeric 'ap'");
        ApReport::ClassStats s;
        s.ap = stats["ap"].get<double>();
        s.tp = stats.value("tp", 0);
        s.fp = stats.value("fp", 0);
        s.gt = stats.value("gt", 0);
        report.classes.push_back(cls);
        report.stats[cls] = s;
    }
    report.map = doc["map"].get<double>();
    return report;
}

std::string render_trajectory_json(const Trajectory& trajectory, PairingMode mode,
                                   const Provenance& prov) {
    ordered_json j;
    j["pairing"] = pairing_mode_name(mode);
    j["stages"] = ordered_json::array();
    for (const StageOutcome& stage : trajectory.stages) {
        ordered_json s;
        s["id"] = stage.quality.stage_id;
        s["n"] = stage.quality.n;
        s["phi"] = stage.quality.phi;
        s["decision"] = decision_name(stage.decision);
        j["stages"].push_back(std::move(s));
    }
    j["deltas"] = trajectory.deltas;
    if (trajectory.rollback_to) j["rollback_to"] = *trajectory.rollback_to;
    j["provenance"] = provenance_json(prov);
    return j.dump(2) + "\n";
}

} // namespace restorex
