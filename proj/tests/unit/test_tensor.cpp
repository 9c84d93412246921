#include <doctest.h>

#include <cstring>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "restorex/rng.hpp"
#include "restorex/tensor.hpp"

using namespace restorex;
using restorex::testing::TempDir;
using restorex::testing::code_of;

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(v & 0xFF);
    out.push_back((v >> 8) & 0xFF);
    out.push_back((v >> 16) & 0xFF);
    out.push_back((v >> 24) & 0xFF);
}

std::vector<std::uint8_t> raw_header(std::uint32_t ndim, std::uint32_t k, std::uint32_t u,
                                     std::uint32_t v) {
    std::vector<std::uint8_t> bytes = {'R', 'X', 'T', '1'};
    put_u32(bytes, ndim);
    put_u32(bytes, k);
    put_u32(bytes, u);
    put_u32(bytes, v);
    return bytes;
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32(out, bits);
}

Tensor3 random_tensor(SplitMix64& rng, std::uint32_t max_channels = 8, std::uint32_t max_side = 16) {
    auto t = make_tensor(1 + static_cast<std::uint32_t>(rng.next_below(max_channels)),
                         1 + static_cast<std::uint32_t>(rng.next_below(max_side)),
                         1 + static_cast<std::uint32_t>(rng.next_below(max_side)));
    for (auto& v : t.data) v = static_cast<float>(rng.next_in(-100.0, 100.0));
    return t;
}

} // namespace

TEST_SUITE("tensor") {

TEST_CASE("minimal 1x1x1 parses from 24 bytes") {
    auto bytes = raw_header(3, 1, 1, 1);
    put_f32(bytes, 1.0f);
    REQUIRE(bytes.size() == 24);
    Tensor3 t = parse_tensor(bytes);
    CHECK(t.channels == 1);
    CHECK(t.height == 1);
    CHECK(t.width == 1);
    CHECK(t.data == std::vector<float>{1.0f});
}

TEST_CASE("2x2x2 layout is row-major, width fastest") {
    auto bytes = raw_header(3, 2, 2, 2);
    for (int i = 0; i < 8; ++i) put_f32(bytes, static_cast<float>(i));
    Tensor3 t = parse_tensor(bytes);
    for (std::uint32_t c = 0; c < 2; ++c)
        for (std::uint32_t y = 0; y < 2; ++y)
            for (std::uint32_t x = 0; x < 2; ++x)
                CHECK(t.at(c, y, x) == static_cast<float>(c * 4 + y * 2 + x));
}

TEST_CASE("short payload is a dim mismatch") {
    auto bytes = raw_header(3, 2, 2, 2);
    for (int i = 0; i < 7; ++i) put_f32(bytes, 0.0f);
    CHECK(code_of([&] { parse_tensor(bytes); }) == errc::dim_mismatch);
}

TEST_CASE("header errors are typed") {
    auto bad_magic = raw_header(3, 1, 1, 1);
    bad_magic[0] = 'Q';
    put_f32(bad_magic, 0.0f);
    CHECK(code_of([&] { parse_tensor(bad_magic); }) == errc::bad_magic);

    auto ndim2 = raw_header(2, 1, 1, 1);
    put_f32(ndim2, 0.0f);
    CHECK(code_of([&] { parse_tensor(ndim2); }) == errc::ndim_unsupported);

    auto zero_dim = raw_header(3, 0, 1, 1);
    CHECK(code_of([&] { parse_tensor(zero_dim); }) == errc::dim_mismatch);

    auto huge = raw_header(3, 0xFFFFFFFF, 0xFFFFFFFF, 2);
    CHECK(code_of([&] { parse_tensor(huge); }) == errc::dim_mismatch);
}

TEST_CASE("non-finite payload values are rejected") {
    auto bytes = raw_header(3, 1, 1, 2);
    put_f32(bytes, 1.0f);
    put_f32(bytes, std::numeric_limits<float>::quiet_NaN());
    CHECK(code_of([&] { parse_tensor(bytes); }) == errc::non_finite);

    bytes = raw_header(3, 1, 1, 1);
    put_f32(bytes, std::numeric_limits<float>::infinity());
    CHECK(code_of([&] { parse_tensor(bytes); }) == errc::non_finite);
}

TEST_CASE("write emits 24 bytes for the minimal tensor and echoes dims") {
    Tensor3 t = make_tensor(1, 1, 1);
    CHECK(write_tensor(t).size() == 24);

    Tensor3 big = make_tensor(2, 3, 4);
    auto bytes = write_tensor(big);
    Tensor3 back = parse_tensor(bytes);
    CHECK(back.channels == 2);
    CHECK(back.height == 3);
    CHECK(back.width == 4);
}

TEST_CASE("round trip is bit-exact over 1000 seeded tensors") {
    SplitMix64 rng(20240901);
    for (int i = 0; i < 1000; ++i) {
        Tensor3 t = random_tensor(rng);
        Tensor3 back = parse_tensor(write_tensor(t));
        REQUIRE(back == t);
    }
}

TEST_CASE("file round trip") {
    TempDir dir;
    SplitMix64 rng(7);
    Tensor3 t = random_tensor(rng);
    auto path = dir / "t.rxt";
    write_tensor_file(t, path);
    CHECK(read_tensor_file(path) == t);
    CHECK(code_of([&] { read_tensor_file(dir / "missing.rxt"); }) == errc::io_error);
}

TEST_CASE("parser is total over random byte blobs") {
    SplitMix64 rng(99);
    for (int i = 0; i < 500; ++i) {
        std::vector<std::uint8_t> blob(rng.next_below(64));
        for (auto& b : blob) b = static_cast<std::uint8_t>(rng.next());
        // Either parses or throws a typed Error; anything else fails the test.
        try {
            (void)parse_tensor(blob);
        } catch (const Error&) {
        }
    }
    CHECK(true);
}

TEST_CASE("validate_tensor rejects length drift and non-finite data") {
    Tensor3 t = make_tensor(2, 2, 2);
    t.data.pop_back();
    CHECK(code_of([&] { validate_tensor(t); }) == errc::dim_mismatch);

    Tensor3 u = make_tensor(1, 1, 1);
    u.data[0] = std::numeric_limits<float>::quiet_NaN();
    CHECK(code_of([&] { validate_tensor(u); }) == errc::non_finite);
    CHECK(code_of([&] { write_tensor(u); }) == errc::non_finite);
}

} // TEST_SUITE
