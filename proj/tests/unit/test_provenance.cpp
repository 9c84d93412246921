#include <doctest.h>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "restorex/provenance.hpp"

using namespace restorex;
using restorex::testing::TempDir;
using restorex::testing::code_of;
using restorex::testing::write_text_file;

TEST_SUITE("provenance") {

TEST_CASE("fnv1a64 reference vectors") {
    // published FNV-1a test values
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("byte and string overloads agree") {
    const std::string text = "restorex";
    std::vector<std::uint8_t> bytes(text.begin(), text.end());
    CHECK(fnv1a64(text) == fnv1a64(std::span<const std::uint8_t>(bytes)));
}

TEST_CASE("hex formatting is zero-padded lowercase") {
    CHECK(hex_u64(0) == "0000000000000000");
    CHECK(hex_u64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
    CHECK(hex_u64(0xABCDULL) == "000000000000abcd");
}

TEST_CASE("file digest equals the in-memory digest of the same bytes") {
    TempDir dir;
    const std::string payload = "stage 1 detections\n";
    auto path = dir.path() / "input.json";
    write_text_file(path, payload);
    CHECK(fnv1a64_file(path) == fnv1a64(payload));
    CHECK(code_of([&] { fnv1a64_file(dir.path() / "absent.json"); }) == errc::io_error);
}

TEST_CASE("config hash is stable and sensitive to flags and inputs") {
    TempDir dir;
    auto path = dir.path() / "dets.json";
    write_text_file(path, "{}");

    auto a = make_provenance({{"subcommand", "eval"}, {"iou", "0.5"}}, {path});
    auto b = make_provenance({{"subcommand", "eval"}, {"iou", "0.5"}}, {path});
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash.rfind("fnv1a64:", 0) == 0);
    CHECK(a.tool == "restorex");
    CHECK_FALSE(a.version.empty());
    REQUIRE(a.inputs.size() == 1);
    CHECK(a.inputs[0].second == hex_u64(fnv1a64("{}")));

    auto different_flag = make_provenance({{"subcommand", "eval"}, {"iou", "0.75"}}, {path});
    CHECK(different_flag.config_hash != a.config_hash);

    write_text_file(path, "{\"images\":[]}");
    auto different_input = make_provenance({{"subcommand", "eval"}, {"iou", "0.5"}}, {path});
    CHECK(different_input.config_hash != a.config_hash);
}

TEST_CASE("timestamps appear only on request") {
    auto silent = make_provenance({}, {});
    CHECK_FALSE(silent.timestamp.has_value());

    auto stamped = make_provenance({}, {}, true);
    REQUIRE(stamped.timestamp.has_value());
    // RFC 3339 UTC: 2026-01-02T03:04:05Z
    CHECK(stamped.timestamp->size() == 20);
    CHECK(stamped.timestamp->back() == 'Z');
    CHECK((*stamped.timestamp)[4] == '-');
    CHECK((*stamped.timestamp)[10] == 'T');
}

} // TEST_SUITE
