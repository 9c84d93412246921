#include "restorex/manifest.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "restorex/errors.hpp"

namespace restorex {

namespace {

using nlohmann::json;

std::string require_path(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw Error(errc::schema_error, "missing or non-string field '" + std::string(key) + "' in " + where);
    const std::string s = it->get<std::string>();
    if (s.empty()) throw Error(errc::schema_error, "empty path for '" + std::string(key) + "' in " + where);
    return s;
}

std::optional<std::filesystem::path> optional_path(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(errc::schema_error, "field '" + std::string(key) + "' in " + where + " is not a string");
    return std::filesystem::path(it->get<std::string>());
}

} // namespace

StageManifest parse_manifest(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(errc::schema_error, "document is not valid JSON");
    auto stages_it = doc.find("stages");
    if (!doc.is_object() || stages_it == doc.end() || !stages_it->is_array())
        throw Error(errc::schema_error, "missing 'stages' array");
    if (stages_it->empty()) throw Error(errc::schema_error, "manifest has no stages");

    StageManifest out;
    for (std::size_t i = 0; i < stages_it->size(); ++i) {
        const json& s = (*stages_it)[i];
        const std::string where = "stages[" + std::to_string(i) + "]";
        StageEntry entry;

        auto id_it = s.find("id");
        if (!s.is_object() || id_it == s.end() || !id_it->is_number_integer())
            throw Error(errc::schema_error, "missing integer 'id' in " + where);
        entry.id = id_it->get<int>();
        if (entry.id < 1) throw Error(errc::schema_error, "stage id must be positive in " + where);

        auto range_it = s.find("epoch_range");
        if (range_it == s.end() || !range_it->is_array() || range_it->size() != 2 ||
            !(*range_it)[0].is_number_integer() || !(*range_it)[1].is_number_integer())
            throw Error(errc::schema_error, "'epoch_range' in " + where + " must be [first,last] integers");
        entry.epoch_first = (*range_it)[0].get<int>();
        entry.epoch_last = (*range_it)[1].get<int>();
        if (entry.epoch_first > entry.epoch_last)
            throw Error(errc::schema_error, "epoch_range runs backwards in " + where);

        entry.detections_path = require_path(s, "detections", where);
        entry.ground_truth_path = require_path(s, "ground_truth", where);
        entry.attention_dir = optional_path(s, "attention_dir", where);
        entry.restored_dir = optional_path(s, "restored_dir", where);
        entry.input_dir = optional_path(s, "input_dir", where);

        if (!out.stages.empty()) {
            const StageEntry& prev = out.stages.back();
            if (entry.id <= prev.id)
                throw Error(errc::stage_order_error, "stage ids must be strictly increasing (" +
                                                         std::to_string(prev.id) + " then " +
                                                         std::to_string(entry.id) + ")");
            if (entry.epoch_first <= prev.epoch_last)
                throw Error(errc::epoch_overlap_error,
                            "epoch range of stage " + std::to_string(entry.id) + " overlaps stage " +
                                std::to_string(prev.id));
        }
        out.stages.push_back(std::move(entry));
    }
    return out;
}

StageManifest load_manifest_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(errc::io_error, "read failed for " + path.string());

    StageManifest manifest = parse_manifest(ss.str());
    const std::filesystem::path base = path.parent_path();
    auto resolve = [&base](std::filesystem::path& p) {
        if (p.is_relative()) p = base / p;
    };
    for (StageEntry& stage : manifest.stages) {
        resolve(stage.detections_path);
        resolve(stage.ground_truth_path);
        if (stage.attention_dir) resolve(*stage.attention_dir);
        if (stage.restored_dir) resolve(*stage.restored_dir);
        if (stage.input_dir) resolve(*stage.input_dir);
    }
    return manifest;
}

} // namespace restorex
