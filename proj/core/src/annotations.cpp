#include "restorex/annotations.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "restorex/errors.hpp"

namespace restorex {

namespace {

using nlohmann::json;

json parse_json(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(errc::schema_error, "document is not valid JSON");
    return doc;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (!obj.is_object() || it == obj.end())
        throw Error(errc::schema_error, "missing field '" + std::string(key) + "' in " + where);
    return *it;
}

double require_number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw Error(errc::schema_error, "field '" + std::string(key) + "' in " + where + " is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(errc::schema_error, "field '" + std::string(key) + "' in " + where + " is not finite");
    return d;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw Error(errc::schema_error, "field '" + std::string(key) + "' in " + where + " is not a string");
    return v.get<std::string>();
}

int require_positive_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer())
        throw Error(errc::schema_error, "field '" + std::string(key) + "' in " + where + " is not an integer");
    const int i = v.get<int>();
    if (i < 1) throw Error(errc::schema_error, "field '" + std::string(key) + "' in " + where + " must be >= 1");
    return i;
}

BoundingBox parse_box(const json& obj, const std::string& where) {
    const json& arr = require(obj, "box", where);
    if (!arr.is_array() || arr.size() != 4)
        throw Error(errc::schema_error, "field 'box' in " + where + " must be an array of 4 numbers");
    BoundingBox box;
    double* coords[4] = {&box.x_min, &box.y_min, &box.x_max, &box.y_max};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!arr[i].is_number())
            throw Error(errc::schema_error, "field 'box' in " + where + " must be an array of 4 numbers");
        *coords[i] = arr[i].get<double>();
    }
    try {
        validate_box(box);
    } catch (const Error& e) {
        throw Error(errc::box_error, std::string(e.what()) + " (in " + where + ")");
    }
    return box;
}

double unit_interval(const json& obj, const char* key, const std::string& where) {
    const double v = require_number(obj, key, where);
    if (v < 0.0 || v > 1.0)
        throw Error(errc::range_error, "field '" + std::string(key) + "' in " + where + " outside [0,1]: " +
                                           std::to_string(v));
    return v;
}

template <typename ImageT>
void parse_image_header(const json& img, std::size_t idx, ImageT& out, std::set<std::string>& seen_ids) {
    const std::string where = "images[" + std::to_string(idx) + "]";
    out.id = require_string(img, "id", where);
    out.width = require_positive_int(img, "width", where);
    out.height = require_positive_int(img, "height", where);
    if (!seen_ids.insert(out.id).second)
        throw Error(errc::schema_error, "duplicate image id '" + out.id + "'");
}

} // namespace

void validate_box(const BoundingBox& box) {
    const double coords[4] = {box.x_min, box.y_min, box.x_max, box.y_max};
    for (double c : coords) {
        if (!std::isfinite(c)) throw Error(errc::box_error, "box coordinate not finite");
        if (c < 0.0) throw Error(errc::box_error, "box coordinate negative");
    }
    if (!(box.x_min < box.x_max) || !(box.y_min < box.y_max))
        throw Error(errc::box_error, "degenerate box (min must be < max on both axes)");
}

DetectionsDoc parse_detections(std::string_view text) {
    const json doc = parse_json(text);
    const json& images = require(doc, "images", "document root");
    if (!images.is_array()) throw Error(errc::schema_error, "'images' must be an array");

    DetectionsDoc out;
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < images.size(); ++i) {
        DetectionsDoc::Image image;
        parse_image_header(images[i], i, image, seen_ids);
        const json& dets = require(images[i], "detections", "images[" + std::to_string(i) + "]");
        if (!dets.is_array()) throw Error(errc::schema_error, "'detections' must be an array");
        for (std::size_t j = 0; j < dets.size(); ++j) {
            const std::string where = "image '" + image.id + "' detections[" + std::to_string(j) + "]";
            Detection d;
            d.image_id = image.id;
            d.box = parse_box(dets[j], where);
            d.label = require_string(dets[j], "label", where);
            d.score = unit_interval(dets[j], "score", where);
            if (dets[j].contains("explain_prob")) d.explain_prob = unit_interval(dets[j], "explain_prob", where);
            image.detections.push_back(std::move(d));
        }
        out.images.push_back(std::move(image));
    }
    return out;
}

GroundTruthDoc parse_ground_truth(std::string_view text) {
    const json doc = parse_json(text);
    const json& images = require(doc, "images", "document root");
    if (!images.is_array()) throw Error(errc::schema_error, "'images' must be an array");

    GroundTruthDoc out;
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < images.size(); ++i) {
        GroundTruthDoc::Image image;
        parse_image_header(images[i], i, image, seen_ids);
        const json& objs = require(images[i], "objects", "images[" + std::to_string(i) + "]");
        if (!objs.is_array()) throw Error(errc::schema_error, "'objects' must be an array");
        bool have_primary = false;
        for (std::size_t j = 0; j < objs.size(); ++j) {
            const std::string where = "image '" + image.id + "' objects[" + std::to_string(j) + "]";
            GroundTruthObject g;
            g.image_id = image.id;
            g.box = parse_box(objs[j], where);
            g.label = require_string(objs[j], "label", where);
            if (objs[j].contains("primary")) {
                const json& p = objs[j]["primary"];
                if (!p.is_boolean()) throw Error(errc::schema_error, "field 'primary' in " + where + " is not a boolean");
                g.primary = p.get<bool>();
            }
            if (g.primary) {
                if (have_primary)
                    throw Error(errc::primary_conflict, "two primary objects in image '" + image.id + "'");
                have_primary = true;
            }
            image.objects.push_back(std::move(g));
        }
        out.images.push_back(std::move(image));
    }
    return out;
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(errc::io_error, "read failed for " + path);
    return ss.str();
}

} // namespace

DetectionsDoc load_detections_file(const std::string& path) {
    try {
        return parse_detections(slurp(path));
    } catch (const Error& e) {
        if (e.code() == errc::io_error) throw;
        throw Error(e.code(), e.message() + " [" + path + "]");
    }
}

GroundTruthDoc load_ground_truth_file(const std::string& path) {
    try {
        return parse_ground_truth(slurp(path));
    } catch (const Error& e) {
        if (e.code() == errc::io_error) throw;
        throw Error(e.code(), e.message() + " [" + path + "]");
    }
}

} // namespace restorex
