#include "restorex/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "restorex/annotations.hpp"
#include "restorex/errors.hpp"
#include "restorex/image.hpp"
#include "restorex/rng.hpp"
#include "restorex/similarity.hpp"
#include "restorex/tensor.hpp"

namespace restorex {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Two decimal places, round half up. Keeps emitted JSON compact and makes
// hand-checking fixture numbers practical.
double round2(double v) { return std::floor(v * 100.0 + 0.5) / 100.0; }

std::string image_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "img_%04d", i + 1);
    return buf;
}

std::string stage_dir_name(int s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "stage_%02d", s);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io_error, "cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(errc::io_error, "write failed: " + path.string());
}

BoundingBox random_box(SplitMix64& rng, int width, int height) {
    double bw = 8.0 + rng.next_in(0.0, width / 2.0 - 8.0);
    double bh = 8.0 + rng.next_in(0.0, height / 2.0 - 8.0);
    double x0 = round2(rng.next_in(0.0, width - bw));
    double y0 = round2(rng.next_in(0.0, height - bh));
    // Rounding half up can push the far edge past the frame; clamp so the
    // boxes stay valid attention-region inputs.
    double x1 = std::min(round2(x0 + bw), static_cast<double>(width));
    double y1 = std::min(round2(y0 + bh), static_cast<double>(height));
    return BoundingBox{x0, y0, x1, y1};
}

ordered_json box_json(const BoundingBox& b) {
    return ordered_json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

struct GtImage {
    std::string id;
    std::vector<GroundTruthObject> objects; // objects[0] is primary
};

Image8 synth_input(SplitMix64& rng, const FixtureSpec& spec, const GtImage& gt,
                   const std::vector<std::string>& classes) {
    static constexpr std::uint8_t kPalette[8][3] = {
        {200, 60, 60},  {60, 200, 60},  {60, 60, 200},  {200, 200, 60},
        {200, 60, 200}, {60, 200, 200}, {230, 140, 40}, {140, 140, 140},
    };
    Image8 img = make_image(spec.image_width, spec.image_height);
    for (int y = 0; y < img.height; ++y) {
        auto base = static_cast<std::uint8_t>(40 + 120 * y / img.height);
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = static_cast<std::uint8_t>(base + (rng.next() & 31));
    }
    for (const auto& obj : gt.objects) {
        auto cls = std::find(classes.begin(), classes.end(), obj.label) - classes.begin();
        const auto* color = kPalette[static_cast<std::size_t>(cls) % 8];
        int x0 = std::max(0, static_cast<int>(obj.box.x_min));
        int y0 = std::max(0, static_cast<int>(obj.box.y_min));
        int x1 = std::min(img.width, static_cast<int>(obj.box.x_max));
        int y1 = std::min(img.height, static_cast<int>(obj.box.y_max));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                for (int c = 0; c < 3; ++c) img.at(x, y, c) = color[c];
    }
    return img;
}

Image8 synth_restored(SplitMix64& rng, const Image8& input, int stage) {
    Image8 out = input;
    int lift = 8 * stage;
    for (auto& px : out.pixels) {
        int v = px + lift + static_cast<int>(rng.next() & 7);
        px = static_cast<std::uint8_t>(std::min(v, 255));
    }
    return out;
}

Tensor3 synth_tensor(SplitMix64& rng, const FixtureSpec& spec, double lo, double hi) {
    Tensor3 t = make_tensor(spec.tensor_channels, spec.tensor_height, spec.tensor_width);
    for (auto& v : t.data) v = static_cast<float>(rng.next_in(lo, hi));
    return t;
}

void validate_spec(const FixtureSpec& spec) {
    if (spec.n_images < 1) throw Error(errc::range_error, "n_images must be >= 1");
    if (spec.n_stages < 1) throw Error(errc::range_error, "n_stages must be >= 1");
    if (!spec.phi_targets.empty() &&
        spec.phi_targets.size() != static_cast<std::size_t>(spec.n_stages))
        throw Error(errc::range_error, "phi_targets must list one target per stage");
    for (double t : spec.phi_targets)
        if (!(t >= 0.0 && t <= 1.0))
            throw Error(errc::range_error, "phi targets must lie in [0, 1]");
    if (spec.tensor_channels < 1 || spec.tensor_height < 1 || spec.tensor_width < 1)
        throw Error(errc::range_error, "tensor dimensions must be >= 1");
    if (spec.image_width < 32 || spec.image_height < 32)
        throw Error(errc::range_error, "image dimensions must be >= 32");
}

} // namespace

FixtureResult generate_fixtures(const FixtureSpec& spec, const fs::path& out_dir) {
    validate_spec(spec);
    std::vector<std::string> classes = spec.classes;
    if (classes.empty()) classes = {"car", "bus", "truck", "motorcycle", "person", "bicycle"};
    for (auto& c : classes) c = normalize_label(c);

    SimilarityTable table = SimilarityTable::defaults(SimilarityMode::grouped);

    // Detection labels draw from the full grouped vocabulary so fixtures
    // exercise synonym folding ("taxi" counting toward "car").
    std::vector<std::string> label_pool = classes;
    for (const auto& cls : classes)
        for (const auto& group : table.groups())
            if (group.head == cls)
                for (const auto& member : group.members)
                    if (member != cls) label_pool.push_back(member);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(errc::io_error, "cannot create " + out_dir.string());

    SplitMix64 master(spec.seed);
    SplitMix64 gt_rng = master.fork();
    SplitMix64 img_rng = master.fork();
    SplitMix64 stage_master = master.fork();

    // Ground truth and raw inputs are shared across stages; only detections,
    // attention tensors and restored frames vary with training progress.
    std::vector<GtImage> gt_images;
    gt_images.reserve(static_cast<std::size_t>(spec.n_images));
    ordered_json gt_doc;
    gt_doc["images"] = ordered_json::array();
    for (int i = 0; i < spec.n_images; ++i) {
        GtImage gi;
        gi.id = image_name(i);
        int n_objects = 1 + static_cast<int>(gt_rng.next_below(3));
        ordered_json objects = ordered_json::array();
        for (int k = 0; k < n_objects; ++k) {
            GroundTruthObject obj;
            obj.label = classes[gt_rng.next_below(classes.size())];
            obj.box = random_box(gt_rng, spec.image_width, spec.image_height);
            obj.primary = (k == 0);
            ordered_json o;
            o["box"] = box_json(obj.box);
            o["label"] = obj.label;
            if (obj.primary) o["primary"] = true;
            objects.push_back(std::move(o));
            gi.objects.push_back(std::move(obj));
        }
        ordered_json entry;
        entry["id"] = gi.id;
        entry["width"] = spec.image_width;
        entry["height"] = spec.image_height;
        entry["objects"] = std::move(objects);
        gt_doc["images"].push_back(std::move(entry));
        gt_images.push_back(std::move(gi));
    }
    write_text(out_dir / "ground_truth.json", gt_doc.dump(2) + "\n");
    write_text(out_dir / "similarity.json", table.to_json());

    std::vector<Image8> inputs;
    if (spec.with_images) {
        fs::create_directories(out_dir / "input", ec);
        if (ec) throw Error(errc::io_error, "cannot create input dir");
        for (int i = 0; i < spec.n_images; ++i) {
            SplitMix64 rng = img_rng.fork();
            inputs.push_back(synth_input(rng, spec, gt_images[static_cast<std::size_t>(i)], classes));
            write_png(inputs.back(), out_dir / "input" / (image_name(i) + ".png"));
        }
    }

    ordered_json manifest;
    manifest["stages"] = ordered_json::array();
    for (int s = 1; s <= spec.n_stages; ++s) {
        SplitMix64 srng = stage_master.fork();
        SplitMix64 det_rng = srng.fork();
        SplitMix64 tensor_rng = srng.fork();
        SplitMix64 restored_rng = srng.fork();

        fs::path stage_dir = out_dir / stage_dir_name(s);
        fs::create_directories(stage_dir, ec);
        if (ec) throw Error(errc::io_error, "cannot create " + stage_dir.string());

        // With a target, the first m images carry a perfect hit (predicted
        // label equals the primary label, unit confidence shift) and the rest
        // carry only zero-shift noise, so phi == m / n exactly.
        long long hits = -1;
        if (!spec.phi_targets.empty())
            hits = std::llround(spec.phi_targets[static_cast<std::size_t>(s - 1)] * spec.n_images);

        ordered_json det_doc;
        det_doc["images"] = ordered_json::array();
        for (int i = 0; i < spec.n_images; ++i) {
            const GtImage& gi = gt_images[static_cast<std::size_t>(i)];
            ordered_json dets = ordered_json::array();
            auto push_det = [&](const BoundingBox& box, const std::string& label, double score,
                                double explain_prob) {
                ordered_json d;
                d["box"] = box_json(box);
                d["label"] = label;
                d["score"] = score;
                d["explain_prob"] = explain_prob;
                dets.push_back(std::move(d));
            };
            if (hits >= 0) {
                if (i < hits) {
                    push_det(gi.objects[0].box, gi.objects[0].label,
                             round2(det_rng.next_in(0.8, 0.99)), 1.0);
                    if (det_rng.next_below(2) == 0)
                        push_det(random_box(det_rng, spec.image_width, spec.image_height),
                                 label_pool[det_rng.next_below(label_pool.size())],
                                 round2(det_rng.next_in(0.1, 0.5)),
                                 round2(det_rng.next_in(0.0, 0.5)));
                } else {
                    int n = static_cast<int>(det_rng.next_below(3));
                    for (int k = 0; k < n; ++k)
                        push_det(random_box(det_rng, spec.image_width, spec.image_height),
                                 label_pool[det_rng.next_below(label_pool.size())],
                                 round2(det_rng.next_in(0.05, 0.6)), 0.0);
                }
            } else {
                int n = static_cast<int>(det_rng.next_below(4));
                for (int k = 0; k < n; ++k) {
                    // Half the detections hug a real object so AP is nontrivial.
                    BoundingBox box;
                    if (det_rng.next_below(2) == 0) {
                        const auto& src = gi.objects[det_rng.next_below(gi.objects.size())].box;
                        double dx = det_rng.next_in(-3.0, 3.0);
                        double dy = det_rng.next_in(-3.0, 3.0);
                        auto cx = [&](double v) {
                            return std::clamp(round2(v), 0.0, static_cast<double>(spec.image_width));
                        };
                        auto cy = [&](double v) {
                            return std::clamp(round2(v), 0.0, static_cast<double>(spec.image_height));
                        };
                        box = BoundingBox{cx(src.x_min + dx), cy(src.y_min + dy),
                                          cx(src.x_max + dx), cy(src.y_max + dy)};
                    } else {
                        box = random_box(det_rng, spec.image_width, spec.image_height);
                    }
                    push_det(box, label_pool[det_rng.next_below(label_pool.size())],
                             round2(det_rng.next_in(0.05, 0.99)),
                             round2(det_rng.next_in(0.0, 1.0)));
                }
            }
            ordered_json entry;
            entry["id"] = gi.id;
            entry["width"] = spec.image_width;
            entry["height"] = spec.image_height;
            entry["detections"] = std::move(dets);
            det_doc["images"].push_back(std::move(entry));
        }
        write_text(stage_dir / "detections.json", det_doc.dump(2) + "\n");

        if (spec.with_tensors) {
            fs::create_directories(stage_dir / "attention", ec);
            if (ec) throw Error(errc::io_error, "cannot create attention dir");
            for (int i = 0; i < spec.n_images; ++i) {
                SplitMix64 rng = tensor_rng.fork();
                write_tensor_file(synth_tensor(rng, spec, 0.0, 1.0),
                                  stage_dir / "attention" / (image_name(i) + ".features.rxt"));
                write_tensor_file(synth_tensor(rng, spec, -1.0, 1.0),
                                  stage_dir / "attention" / (image_name(i) + ".gradients.rxt"));
            }
        }

        if (spec.with_images) {
            fs::create_directories(stage_dir / "restored", ec);
            if (ec) throw Error(errc::io_error, "cannot create restored dir");
            for (int i = 0; i < spec.n_images; ++i) {
                SplitMix64 rng = restored_rng.fork();
                write_png(synth_restored(rng, inputs[static_cast<std::size_t>(i)], s),
                          stage_dir / "restored" / (image_name(i) + ".png"));
            }
        }

        ordered_json entry;
        entry["id"] = s;
        entry["epoch_range"] = ordered_json::array({20 * (s - 1) + 1, 20 * s});
        entry["detections"] = stage_dir_name(s) + "/detections.json";
        entry["ground_truth"] = "ground_truth.json";
        if (spec.with_tensors) entry["attention_dir"] = stage_dir_name(s) + "/attention";
        if (spec.with_images) {
            entry["restored_dir"] = stage_dir_name(s) + "/restored";
            entry["input_dir"] = "input";
        }
        manifest["stages"].push_back(std::move(entry));
    }
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    return FixtureResult{out_dir / "manifest.json", out_dir / "similarity.json"};
}

} // namespace restorex
