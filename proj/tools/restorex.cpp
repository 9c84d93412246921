// restorex: deterministic evaluation harness for restoration-aware object
// detection. Subcommands score detection quality (eval), compute the
// contrastive stage metric (phi), drive training guidance (monitor), render
// attention maps (gradcam), and generate synthetic corpora (fixtures).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "restorex/annotations.hpp"
#include "restorex/detection_eval.hpp"
#include "restorex/errors.hpp"
#include "restorex/fixtures.hpp"
#include "restorex/gradcam.hpp"
#include "restorex/image.hpp"
#include "restorex/manifest.hpp"
#include "restorex/provenance.hpp"
#include "restorex/psnr.hpp"
#include "restorex/quality.hpp"
#include "restorex/report.hpp"
#include "restorex/similarity.hpp"
#include "restorex/tensor.hpp"
#include "restorex/version.hpp"

namespace rx = restorex;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    int threads = 0; // 0 = logical cores
    bool quiet = false;
    bool json_only = false;
    bool timestamp = false;

    int effective_threads() const {
        if (threads > 0) return threads;
        unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rx::Error(rx::errc::io_error, "cannot open for writing: " + path.string());
    out << text;
    if (!out) throw rx::Error(rx::errc::io_error, "write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rx::Error(rx::errc::io_error, "cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Emit a machine document: to --out when given, to stdout under --json-only.
void emit_json(const GlobalOpts& g, const std::optional<std::string>& out_path,
               const std::string& json_text) {
    if (out_path) write_file(*out_path, json_text);
    if (g.json_only) std::cout << json_text;
}

bool humans_listening(const GlobalOpts& g) { return !g.quiet && !g.json_only; }

rx::SimilarityTable load_table(const std::optional<std::string>& path, const std::string& mode) {
    if (path) return rx::SimilarityTable::load_file(*path);
    return rx::SimilarityTable::defaults(rx::parse_similarity_mode(mode));
}

std::string table_flag_value(const std::optional<std::string>& path, const std::string& mode) {
    return path ? *path : "builtin:" + mode;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// ---------------------------------------------------------------- eval ----

struct EvalArgs {
    std::string detections;
    std::string ground_truth;
    std::optional<std::string> similarity;
    std::string mode = "grouped";
    double iou = 0.5;
    std::string ap = "all_point";
    std::optional<std::string> classes_csv;
    std::optional<std::string> out;
    std::optional<std::string> markdown;
    std::string technique = "run";
};

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

int run_eval(const GlobalOpts& g, const EvalArgs& a) {
    auto detections = rx::load_detections_file(a.detections);
    auto ground_truth = rx::load_ground_truth_file(a.ground_truth);
    auto table = load_table(a.similarity, a.mode);

    rx::EvalOptions options;
    options.iou_threshold = a.iou;
    options.ap_mode = rx::parse_ap_mode(a.ap);
    if (a.classes_csv) options.classes = split_csv(*a.classes_csv);

    rx::ApReport report = rx::evaluate_detections(detections, ground_truth, table, options);

    std::vector<fs::path> inputs = {a.detections, a.ground_truth};
    if (a.similarity) inputs.push_back(*a.similarity);
    auto prov = rx::make_provenance(
        {{"subcommand", "eval"},
         {"ap", a.ap},
         {"classes", a.classes_csv.value_or("auto")},
         {"iou", format_double(a.iou)},
         {"similarity", table_flag_value(a.similarity, a.mode)}},
        inputs, g.timestamp);

    emit_json(g, a.out, rx::render_eval_json(report, prov));

    if (a.markdown) {
        rx::RunReport run;
        run.technique = a.technique;
        run.classes = report.classes;
        run.rows.push_back(rx::RunReportRow{"1", report.stats, report.map, {}, {}});
        run.provenance = prov;
        write_file(*a.markdown, rx::render_markdown(run));
    }

    if (humans_listening(g)) {
        for (const auto& cls : report.classes) {
            const auto& s = report.stats.at(cls);
            std::cout << cls << ": ap " << format_double(s.ap) << " (display "
                      << rx::display_percent(s.ap) << ") tp " << s.tp << " fp " << s.fp << " gt "
                      << s.gt << "\n";
        }
        std::cout << "mAP " << format_double(report.map) << " (display "
                  << rx::display_percent(report.map) << ")\n";
    }
    return 0;
}

// ----------------------------------------------------------------- phi ----

struct PhiArgs {
    std::string detections;
    std::string ground_truth;
    std::optional<std::string> similarity;
    std::string mode = "grouped";
    std::string pairing = "primary_object";
    std::optional<std::string> out;
};

int run_phi(const GlobalOpts& g, const PhiArgs& a) {
    auto detections = rx::load_detections_file(a.detections);
    auto ground_truth = rx::load_ground_truth_file(a.ground_truth);
    auto table = load_table(a.similarity, a.mode);
    auto pairing = rx::parse_pairing_mode(a.pairing);

    auto samples = rx::build_samples(detections, ground_truth, table, pairing);
    auto quality = rx::stage_quality(1, samples);

    std::vector<fs::path> inputs = {a.detections, a.ground_truth};
    if (a.similarity) inputs.push_back(*a.similarity);
    auto prov = rx::make_provenance({{"subcommand", "phi"},
                                     {"pairing", a.pairing},
                                     {"similarity", table_flag_value(a.similarity, a.mode)}},
                                    inputs, g.timestamp);

    nlohmann::ordered_json doc;
    doc["pairing"] = rx::pairing_mode_name(pairing);
    doc["n"] = quality.n;
    doc["phi"] = quality.phi;
    doc["provenance"] = nlohmann::ordered_json::parse(rx::render_provenance_json(prov));
    emit_json(g, a.out, doc.dump(2) + "\n");

    if (humans_listening(g))
        std::cout << "phi " << format_double(quality.phi) << " over " << quality.n << " samples\n";
    return 0;
}

// ------------------------------------------------------------- monitor ----

struct MonitorArgs {
    std::string manifest;
    std::optional<std::string> similarity;
    std::string mode = "grouped";
    std::optional<std::string> policy;
    std::string pairing = "primary_object";
    std::optional<std::string> out;
};

int run_monitor(const GlobalOpts& g, const MonitorArgs& a) {
    auto manifest = rx::load_manifest_file(a.manifest);
    auto table = load_table(a.similarity, a.mode);
    auto policy = a.policy ? rx::load_policy_file(*a.policy) : rx::GuidancePolicy{};
    auto pairing = rx::parse_pairing_mode(a.pairing);

    rx::Trajectory trajectory =
        rx::run_manifest(manifest, table, policy, pairing, g.effective_threads());

    std::vector<fs::path> inputs = {a.manifest};
    if (a.similarity) inputs.push_back(*a.similarity);
    if (a.policy) inputs.push_back(*a.policy);
    auto prov = rx::make_provenance({{"subcommand", "monitor"},
                                     {"pairing", a.pairing},
                                     {"policy", a.policy.value_or("builtin")},
                                     {"similarity", table_flag_value(a.similarity, a.mode)}},
                                    inputs, g.timestamp);

    emit_json(g, a.out, rx::render_trajectory_json(trajectory, pairing, prov));

    if (humans_listening(g)) {
        for (const auto& stage : trajectory.stages)
            std::cout << "stage " << stage.quality.stage_id << ": n=" << stage.quality.n
                      << " phi=" << format_double(stage.quality.phi) << " "
                      << rx::decision_name(stage.decision) << "\n";
        if (trajectory.rollback_to)
            std::cout << "rollback to stage " << *trajectory.rollback_to << "\n";
    }
    return trajectory.stop_recommended() ? 3 : 0;
}

// ------------------------------------------------------------- gradcam ----

struct GradcamArgs {
    std::string features;
    std::string gradients;
    std::string out;
    std::optional<std::string> overlay;
    std::optional<std::string> out_png;
    double alpha = 0.5;
};

int run_gradcam(const GlobalOpts& g, const GradcamArgs& a) {
    auto features = rx::read_tensor_file(a.features);
    auto gradients = rx::read_tensor_file(a.gradients);

    auto weights = rx::neuron_weights(gradients);
    auto heat = rx::normalize(rx::cam(features, weights));

    rx::Tensor3 out = rx::make_tensor(1, heat.height, heat.width);
    out.data = heat.values;
    rx::write_tensor_file(out, a.out);

    if (a.overlay) {
        rx::Image8 image = rx::read_png(*a.overlay);
        rx::HeatMap resized = rx::upsample(heat, static_cast<std::uint32_t>(image.height),
                                           static_cast<std::uint32_t>(image.width));
        rx::write_png(rx::render_overlay(image, resized, a.alpha), *a.out_png);
    }

    if (humans_listening(g)) {
        std::cout << "cam " << heat.width << "x" << heat.height
                  << (heat.is_blank ? " (blank: no positive activation)" : "") << " -> " << a.out
                  << "\n";
        if (a.out_png) std::cout << "overlay -> " << *a.out_png << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- psnr ----

struct PsnrArgs {
    std::string a;
    std::string b;
    std::optional<std::string> out;
};

int run_psnr(const GlobalOpts& g, const PsnrArgs& a) {
    double value = rx::psnr(rx::read_png(a.a), rx::read_png(a.b));
    bool identical = std::isinf(value);

    auto prov = rx::make_provenance({{"subcommand", "psnr"}}, {a.a, a.b}, g.timestamp);
    nlohmann::ordered_json doc;
    doc["psnr_db"] = identical ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(value);
    doc["identical"] = identical;
    doc["provenance"] = nlohmann::ordered_json::parse(rx::render_provenance_json(prov));
    emit_json(g, a.out, doc.dump(2) + "\n");

    if (humans_listening(g)) {
        if (identical)
            std::cout << "psnr inf (identical images)\n";
        else
            std::cout << "psnr " << format_double(value) << " dB\n";
    }
    return 0;
}

// ------------------------------------------------------------ fixtures ----

struct FixturesArgs {
    std::uint64_t seed = 42;
    int images = 10;
    int stages = 3;
    std::string out;
    std::optional<std::string> classes_csv;
    std::optional<std::string> phi_csv;
    bool no_tensors = false;
    bool no_images = false;
};

int run_fixtures(const GlobalOpts& g, const FixturesArgs& a) {
    rx::FixtureSpec spec;
    spec.seed = a.seed;
    spec.n_images = a.images;
    spec.n_stages = a.stages;
    if (a.classes_csv) spec.classes = split_csv(*a.classes_csv);
    if (a.phi_csv)
        for (const auto& item : split_csv(*a.phi_csv)) spec.phi_targets.push_back(std::stod(item));
    spec.with_tensors = !a.no_tensors;
    spec.with_images = !a.no_images;

    auto result = rx::generate_fixtures(spec, a.out);
    if (humans_listening(g)) std::cout << "wrote " << result.manifest_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------- similarity ----

struct SimilarityArgs {
    std::optional<std::string> table;
    std::string mode = "grouped";
    std::optional<std::string> p;
    std::optional<std::string> a;
    bool dump = false;
};

int run_similarity(const GlobalOpts&, const SimilarityArgs& a) {
    auto table = load_table(a.table, a.mode);
    if (a.dump) {
        std::cout << table.to_json();
        return 0;
    }
    if (!a.p || !a.a)
        throw rx::Error(rx::errc::usage_error, "similarity needs --p and --a (or --dump)");
    std::cout << table.similarity(rx::normalize_label(*a.p), rx::normalize_label(*a.a)) << "\n";
    return 0;
}

// -------------------------------------------------------------- report ----

struct ReportArgs {
    std::vector<std::string> evals;
    std::optional<std::string> labels_csv;
    std::string technique = "run";
    std::optional<std::string> trajectory;
    std::optional<std::string> improvement_before_csv;
    std::optional<std::string> improvement_after_csv;
    std::string out;
    std::optional<std::string> json;
};

std::vector<double> parse_double_csv(const std::string& csv) {
    std::vector<double> out;
    for (const auto& item : split_csv(csv)) out.push_back(std::stod(item));
    return out;
}

int run_report(const GlobalOpts& g, const ReportArgs& a) {
    rx::RunReport run;
    run.technique = a.technique;

    std::vector<std::string> labels;
    if (a.labels_csv) {
        labels = split_csv(*a.labels_csv);
        if (labels.size() != a.evals.size())
            throw rx::Error(rx::errc::usage_error, "--labels must name each --eval input");
    }

    for (std::size_t i = 0; i < a.evals.size(); ++i) {
        rx::ApReport report = rx::parse_eval_report(read_file(a.evals[i]));
        if (i == 0) {
            run.classes = report.classes;
        } else if (report.classes != run.classes) {
            throw rx::Error(rx::errc::usage_error,
                            "eval reports disagree on class columns: " + a.evals[i]);
        }
        rx::RunReportRow row;
        row.label = labels.empty() ? std::to_string(i + 1) : labels[i];
        row.stats = report.stats;
        row.map = report.map;
        run.rows.push_back(std::move(row));
    }

    if (a.trajectory) {
        auto doc = nlohmann::ordered_json::parse(read_file(*a.trajectory));
        const auto& stages = doc.at("stages");
        if (stages.size() != run.rows.size())
            throw rx::Error(rx::errc::usage_error, "trajectory stage count != eval report count");
        for (std::size_t i = 0; i < run.rows.size(); ++i) {
            run.rows[i].phi = stages[i].at("phi").get<double>();
            if (i > 0) run.rows[i].delta_phi = doc.at("deltas")[i - 1].get<double>();
        }
    }

    if (a.improvement_before_csv.has_value() != a.improvement_after_csv.has_value())
        throw rx::Error(rx::errc::usage_error,
                        "--improvement-before and --improvement-after go together");
    if (a.improvement_before_csv) {
        auto before = parse_double_csv(*a.improvement_before_csv);
        auto after = parse_double_csv(*a.improvement_after_csv);
        run.improvement = rx::improvement_summary(before, after);
    }

    std::vector<fs::path> inputs(a.evals.begin(), a.evals.end());
    if (a.trajectory) inputs.push_back(*a.trajectory);
    run.provenance = rx::make_provenance(
        {{"subcommand", "report"}, {"technique", a.technique}}, inputs, g.timestamp);

    write_file(a.out, rx::render_markdown(run));
    if (a.json) write_file(*a.json, rx::render_run_report_json(run));
    if (humans_listening(g)) std::cout << "wrote " << a.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic evaluation harness for restoration-aware object detection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("restorex ") + rx::kVersion);

    GlobalOpts g;
    app.add_option("--threads", g.threads, "parallelism cap (default: logical cores)")
        ->envname("RESTOREX_THREADS")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", g.quiet, "suppress human-readable stdout");
    app.add_flag("--json-only", g.json_only, "print machine JSON to stdout, nothing else");
    app.add_flag("--timestamp", g.timestamp, "embed a UTC timestamp in provenance blocks");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "per-class AP and mAP for one detections file");
    eval->add_option("--detections", eval_args.detections, "detections.json")->required();
    eval->add_option("--ground-truth", eval_args.ground_truth, "ground_truth.json")->required();
    eval->add_option("--similarity", eval_args.similarity, "similarity table JSON");
    eval->add_option("--mode", eval_args.mode, "builtin table mode: grouped|strict");
    eval->add_option("--iou", eval_args.iou, "IoU match threshold (default 0.5)");
    eval->add_option("--ap", eval_args.ap, "AP mode: all_point|eleven_point");
    eval->add_option("--classes", eval_args.classes_csv, "comma-separated class list");
    eval->add_option("--out", eval_args.out, "write report JSON here");
    eval->add_option("--markdown", eval_args.markdown, "also write a Markdown table");
    eval->add_option("--technique", eval_args.technique, "table caption for --markdown");

    PhiArgs phi_args;
    auto* phi = app.add_subcommand("phi", "contrastive stage quality for one detections file");
    phi->add_option("--detections", phi_args.detections, "detections.json")->required();
    phi->add_option("--ground-truth", phi_args.ground_truth, "ground_truth.json")->required();
    phi->add_option("--similarity", phi_args.similarity, "similarity table JSON");
    phi->add_option("--mode", phi_args.mode, "builtin table mode: grouped|strict");
    phi->add_option("--pairing", phi_args.pairing, "primary_object|per_detection");
    phi->add_option("--out", phi_args.out, "write phi JSON here");

    MonitorArgs monitor_args;
    auto* monitor =
        app.add_subcommand("monitor", "score a training manifest and recommend continue/stop");
    monitor->add_option("--manifest", monitor_args.manifest, "manifest.json")->required();
    monitor->add_option("--similarity", monitor_args.similarity, "similarity table JSON");
    monitor->add_option("--mode", monitor_args.mode, "builtin table mode: grouped|strict");
    monitor->add_option("--policy", monitor_args.policy, "guidance policy JSON");
    monitor->add_option("--pairing", monitor_args.pairing, "primary_object|per_detection");
    monitor->add_option("--out", monitor_args.out, "write trajectory JSON here");

    GradcamArgs gradcam_args;
    auto* gradcam = app.add_subcommand("gradcam", "attention map from a feature/gradient pair");
    gradcam->add_option("--features", gradcam_args.features, "features .rxt")->required();
    gradcam->add_option("--gradients", gradcam_args.gradients, "gradients .rxt")->required();
    gradcam->add_option("--out", gradcam_args.out, "output heatmap .rxt (1 x u x v)")->required();
    auto* overlay_opt =
        gradcam->add_option("--overlay", gradcam_args.overlay, "PNG to blend the heatmap over");
    auto* out_png_opt = gradcam->add_option("--out-png", gradcam_args.out_png, "overlay output PNG");
    overlay_opt->needs(out_png_opt);
    out_png_opt->needs(overlay_opt);
    gradcam->add_option("--alpha", gradcam_args.alpha, "blend weight in [0,1], default 0.5");

    PsnrArgs psnr_args;
    auto* psnr = app.add_subcommand("psnr", "peak signal-to-noise ratio between two PNGs");
    psnr->add_option("--a", psnr_args.a, "first image")->required();
    psnr->add_option("--b", psnr_args.b, "second image")->required();
    psnr->add_option("--out", psnr_args.out, "write psnr JSON here");

    FixturesArgs fixtures_args;
    auto* fixtures = app.add_subcommand("fixtures", "generate a deterministic synthetic corpus");
    fixtures->add_option("--seed", fixtures_args.seed, "RNG seed (default 42)");
    fixtures->add_option("--images", fixtures_args.images, "images per stage (default 10)");
    fixtures->add_option("--stages", fixtures_args.stages, "training stages (default 3)");
    fixtures->add_option("--out", fixtures_args.out, "output directory")->required();
    fixtures->add_option("--classes", fixtures_args.classes_csv, "comma-separated class list");
    fixtures->add_option("--phi", fixtures_args.phi_csv,
                         "comma-separated per-stage phi targets in [0,1]");
    fixtures->add_flag("--no-tensors", fixtures_args.no_tensors, "skip attention tensors");
    fixtures->add_flag("--no-images", fixtures_args.no_images, "skip PNG frames");

    SimilarityArgs similarity_args;
    auto* similarity = app.add_subcommand("similarity", "query a label-similarity table");
    similarity->add_option("--table", similarity_args.table, "similarity table JSON");
    similarity->add_option("--mode", similarity_args.mode, "builtin table mode: grouped|strict");
    similarity->add_option("--p", similarity_args.p, "predicted label");
    similarity->add_option("--a", similarity_args.a, "actual label");
    similarity->add_flag("--dump", similarity_args.dump, "print the table as JSON");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "multi-stage Markdown/JSON table from eval outputs");
    report->add_option("--eval", report_args.evals, "eval report JSON (repeat per stage)")
        ->required();
    report->add_option("--labels", report_args.labels_csv, "comma-separated row labels");
    report->add_option("--technique", report_args.technique, "technique column header");
    report->add_option("--trajectory", report_args.trajectory,
                       "trajectory JSON to add phi/delta-phi columns");
    report->add_option("--improvement-before", report_args.improvement_before_csv,
                       "baseline metric values, comma-separated");
    report->add_option("--improvement-after", report_args.improvement_after_csv,
                       "improved metric values, comma-separated");
    report->add_option("--out", report_args.out, "output Markdown path")->required();
    report->add_option("--json", report_args.json, "also write the report as JSON");

    try {
        app.parse(argc, argv);

        if (eval->parsed()) return run_eval(g, eval_args);
        if (phi->parsed()) return run_phi(g, phi_args);
        if (monitor->parsed()) return run_monitor(g, monitor_args);
        if (gradcam->parsed()) return run_gradcam(g, gradcam_args);
        if (psnr->parsed()) return run_psnr(g, psnr_args);
        if (fixtures->parsed()) return run_fixtures(g, fixtures_args);
        if (similarity->parsed()) return run_similarity(g, similarity_args);
        if (report->parsed()) return run_report(g, report_args);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "restorex: error: usage_error: " << e.what() << "\n";
        return 2;
    } catch (const rx::Error& e) {
        std::cerr << "restorex: error: " << e.what() << "\n";
        return e.code() == rx::errc::usage_error ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "restorex: error: " << e.what() << "\n";
        return 1;
    }
}
