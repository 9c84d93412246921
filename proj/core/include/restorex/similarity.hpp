#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace restorex {

enum class SimilarityMode { grouped, strict };

const char* similarity_mode_name(SimilarityMode mode) noexcept;
SimilarityMode parse_similarity_mode(std::string_view name);

/// Canonical form used everywhere labels are compared: lowercased, hyphens
/// replaced by spaces, trimmed, internal whitespace collapsed to single
/// spaces. Throws empty_label if nothing remains.
std::string normalize_label(std::string_view raw);

/// Binary label similarity. In grouped mode two labels score 1 when equal
/// or co-members of one group ("taxi" and "car"); strict mode requires
/// string equality. Groups map classifier vocabulary (e.g. "race car",
/// "trolley bus") onto a head detection class used for per-class AP
/// bucketing.
class SimilarityTable {
public:
    struct Group {
        std::string head;                 // member of its own group
        std::vector<std::string> members; // normalized, includes head
    };

    /// Parse {"mode":"grouped"|"strict","groups":[{"head":str,"members":[str,...]},...]}.
    /// Groups must be pairwise disjoint after normalization. A per-group
    /// "similarity" field, if present, must be exactly 1; this table only
    /// models {0,1} similarity.
    static SimilarityTable parse(std::string_view json_text);

    static SimilarityTable load_file(const std::string& path);

    /// The built-in vocabulary: person (groom, bridegroom, baseball player,
    /// scuba diver), car (cab, taxi, race car, jeep, minivan, estate car,
    /// station wagon), motorcycle (moped), bus (trolley bus, mini bus,
    /// school bus), bicycle (tandem bicycle, tricycle, unicycle, mountain
    /// bike, all terrain bike, off roader, trike), plus a singleton truck
    /// group so all six detection classes are addressable.
    static SimilarityTable defaults(SimilarityMode mode);

    SimilarityMode mode() const { return mode_; }
    const std::vector<Group>& groups() const { return groups_; }

    /// S(p, a) in {0,1}. Labels must already be normalized; unknown labels
    /// score 0 unless string-equal. Symmetric in its arguments.
    int similarity(std::string_view p, std::string_view a) const;

    /// Head class of the containing group, or nullopt for labels outside
    /// the table.
    std::optional<std::string> canonical_class(std::string_view label) const;

    /// Serialize back to the similarity.json schema.
    std::string to_json() const;

private:
    SimilarityTable() = default;
    void index_groups(); // enforces disjointness

    SimilarityMode mode_ = SimilarityMode::grouped;
    std::vector<Group> groups_;
    std::unordered_map<std::string, std::size_t> group_of_;
};

} // namespace restorex
