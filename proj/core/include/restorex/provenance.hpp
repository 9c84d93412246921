#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace restorex {

/// FNV-1a 64-bit digest. Not cryptographic; used only to make report inputs
/// attributable and to detect accidental input drift between runs.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

std::string hex_u64(std::uint64_t value);

/// Attribution block embedded in every JSON report: the flag set, input
/// digests, and a hash over both. Deterministic by construction — no
/// timestamp unless explicitly requested.
struct Provenance {
    std::string tool = "restorex";
    std::string version;
    std::vector<std::pair<std::string, std::string>> flags;  // flag -> rendered value
    std::vector<std::pair<std::string, std::string>> inputs; // path -> fnv1a64 digest
    std::string config_hash;
    std::optional<std::string> timestamp; // RFC 3339 UTC, only with --timestamp
};

Provenance make_provenance(std::vector<std::pair<std::string, std::string>> flags,
                           const std::vector<std::filesystem::path>& inputs,
                           bool with_timestamp = false);

} // namespace restorex
