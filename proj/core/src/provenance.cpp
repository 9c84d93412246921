#include "restorex/provenance.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <vector>

#include "restorex/errors.hpp"
#include "restorex/version.hpp"

namespace restorex {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

} // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = kFnvOffset;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view text) {
    return fnv1a64(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                 text.size()));
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path.string());
    std::uint64_t h = kFnvOffset;
    char buffer[1 << 14];
    while (in) {
        in.read(buffer, sizeof(buffer));
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<std::uint8_t>(buffer[i]);
            h *= kFnvPrime;
        }
    }
    if (in.bad()) throw Error(errc::io_error, "read failed for " + path.string());
    return h;
}

std::string hex_u64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

Provenance make_provenance(std::vector<std::pair<std::string, std::string>> flags,
                           const std::vector<std::filesystem::path>& inputs, bool with_timestamp) {
    Provenance prov;
    prov.version = kVersion;
    prov.flags = std::move(flags);

    std::string canonical;
    for (const auto& [flag, value] : prov.flags) canonical += flag + "=" + value + ";";
    for (const auto& path : inputs) {
        const std::string digest = hex_u64(fnv1a64_file(path));
        prov.inputs.emplace_back(path.generic_string(), digest);
        canonical += path.generic_string() + "#" + digest + ";";
    }
    prov.config_hash = "fnv1a64:" + hex_u64(fnv1a64(canonical));

    if (with_timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm utc{};
        gmtime_r(&now, &utc);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
        prov.timestamp = buf;
    }
    return prov;
}

} // namespace restorex
