#include "restorex/similarity.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "restorex/errors.hpp"

namespace restorex {

namespace {

using nlohmann::ordered_json;

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

} // namespace

const char* similarity_mode_name(SimilarityMode mode) noexcept {
    return mode == SimilarityMode::grouped ? "grouped" : "strict";
}

SimilarityMode parse_similarity_mode(std::string_view name) {
    if (name == "grouped") return SimilarityMode::grouped;
    if (name == "strict") return SimilarityMode::strict;
    throw Error(errc::schema_error, "mode must be 'grouped' or 'strict', got '" + std::string(name) + "'");
}

std::string normalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (c == '-' || is_space(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (out.empty()) throw Error(errc::empty_label, "label is empty after normalization");
    return out;
}

void SimilarityTable::index_groups() {
    group_of_.clear();
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        Group& group = groups_[g];
        if (group.members.empty()) throw Error(errc::schema_error, "group '" + group.head + "' is empty");
        for (const std::string& member : group.members) {
            auto [it, inserted] = group_of_.emplace(member, g);
            if (!inserted && it->second != g)
                throw Error(errc::schema_error, "label '" + member + "' appears in two groups");
        }
        if (group_of_.at(group.head) != g)
            throw Error(errc::schema_error, "head '" + group.head + "' is not a member of its group");
    }
}

SimilarityTable SimilarityTable::parse(std::string_view json_text) {
    ordered_json doc = ordered_json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) throw Error(errc::schema_error, "document is not valid JSON");
    if (!doc.is_object() || !doc.contains("mode") || !doc["mode"].is_string())
        throw Error(errc::schema_error, "missing 'mode' field");

    SimilarityTable table;
    table.mode_ = parse_similarity_mode(doc["mode"].get<std::string>());

    if (!doc.contains("groups") || !doc["groups"].is_array())
        throw Error(errc::schema_error, "missing 'groups' array");

    for (const auto& g : doc["groups"]) {
        if (!g.is_object() || !g.contains("head") || !g["head"].is_string())
            throw Error(errc::schema_error, "each group needs a string 'head'");
        if (g.contains("similarity")) {
            const auto& s = g["similarity"];
            if (!s.is_number() || s.get<double>() != 1.0)
                throw Error(errc::range_error, "group similarity must be exactly 1; fractional similarity is not supported");
        }
        Group group;
        group.head = normalize_label(g["head"].get<std::string>());
        group.members.push_back(group.head);
        if (g.contains("members")) {
            if (!g["members"].is_array()) throw Error(errc::schema_error, "'members' must be an array");
            for (const auto& m : g["members"]) {
                if (!m.is_string()) throw Error(errc::schema_error, "group members must be strings");
                std::string member = normalize_label(m.get<std::string>());
                if (member != group.head) group.members.push_back(std::move(member));
            }
        }
        table.groups_.push_back(std::move(group));
    }
    table.index_groups();
    return table;
}

SimilarityTable SimilarityTable::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

SimilarityTable SimilarityTable::defaults(SimilarityMode mode) {
    SimilarityTable table;
    table.mode_ = mode;
    auto add = [&table](std::string head, std::vector<std::string> synonyms) {
        Group group;
        group.head = std::move(head);
        group.members.push_back(group.head);
        for (std::string& s : synonyms) group.members.push_back(std::move(s));
        table.groups_.push_back(std::move(group));
    };
    add("person", {"groom", "bridegroom", "baseball player", "scuba diver"});
    add("car", {"cab", "taxi", "race car", "jeep", "minivan", "estate car", "station wagon"});
    add("motorcycle", {"moped"});
    add("bus", {"trolley bus", "mini bus", "school bus"});
    add("bicycle", {"tandem bicycle", "tricycle", "unicycle", "mountain bike", "all terrain bike",
                    "off roader", "trike"});
    add("truck", {});
    table.index_groups();
    return table;
}

int SimilarityTable::similarity(std::string_view p, std::string_view a) const {
    if (p.empty() || a.empty()) return 0;
    if (p == a) return 1;
    if (mode_ == SimilarityMode::strict) return 0;
    auto pi = group_of_.find(std::string(p));
    if (pi == group_of_.end()) return 0;
    auto ai = group_of_.find(std::string(a));
    if (ai == group_of_.end()) return 0;
    return pi->second == ai->second ? 1 : 0;
}

std::optional<std::string> SimilarityTable::canonical_class(std::string_view label) const {
    auto it = group_of_.find(std::string(label));
    if (it == group_of_.end()) return std::nullopt;
    return groups_[it->second].head;
}

std::string SimilarityTable::to_json() const {
    ordered_json doc;
    doc["mode"] = similarity_mode_name(mode_);
    doc["groups"] = ordered_json::array();
    for (const Group& group : groups_) {
        ordered_json g;
        g["head"] = group.head;
        g["members"] = ordered_json::array();
        for (const std::string& m : group.members)
            if (m != group.head) g["members"].push_back(m);
        doc["groups"].push_back(std::move(g));
    }
    return doc.dump(2) + "\n";
}

} // namespace restorex
