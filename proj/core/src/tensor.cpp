#include "restorex/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "restorex/errors.hpp"

namespace restorex {

namespace {

constexpr char kMagic[4] = {'R', 'X', 'T', '1'};
constexpr std::uint32_t kNdim = 3;
// 2^31 elements (8 GiB of floats) is far beyond any attention map; a header
// claiming more is treated as corrupt rather than allocated.
constexpr std::uint64_t kMaxElements = 1ULL << 31;

std::uint32_t read_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32le(std::uint32_t v, std::vector<std::uint8_t>& out) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

} // namespace

Tensor3 make_tensor(std::uint32_t channels, std::uint32_t height, std::uint32_t width) {
    if (channels == 0 || height == 0 || width == 0)
        throw Error(errc::dim_mismatch, "tensor dims must be >= 1");
    const std::uint64_t n = static_cast<std::uint64_t>(channels) * height * width;
    if (n > kMaxElements) throw Error(errc::dim_mismatch, "tensor too large");
    Tensor3 t;
    t.channels = channels;
    t.height = height;
    t.width = width;
    t.data.assign(static_cast<std::size_t>(n), 0.0f);
    return t;
}

void validate_tensor(const Tensor3& t) {
    if (t.channels == 0 || t.height == 0 || t.width == 0)
        throw Error(errc::dim_mismatch, "tensor dims must be >= 1");
    const std::uint64_t n = static_cast<std::uint64_t>(t.channels) * t.height * t.width;
    if (t.data.size() != n)
        throw Error(errc::dim_mismatch, "data length " + std::to_string(t.data.size()) +
                                            " does not match dims (" + std::to_string(n) + ")");
    for (float v : t.data)
        if (!std::isfinite(v)) throw Error(errc::non_finite, "tensor contains NaN or Inf");
}

Tensor3 parse_tensor(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw Error(errc::bad_magic, "expected RXT1 magic");
    if (bytes.size() < 8) throw Error(errc::dim_mismatch, "truncated header");
    const std::uint32_t ndim = read_u32le(bytes.data() + 4);
    if (ndim != kNdim)
        throw Error(errc::ndim_unsupported, "ndim " + std::to_string(ndim) + ", only 3 supported");
    if (bytes.size() < 20) throw Error(errc::dim_mismatch, "truncated header");

    const std::uint32_t k = read_u32le(bytes.data() + 8);
    const std::uint32_t u = read_u32le(bytes.data() + 12);
    const std::uint32_t v = read_u32le(bytes.data() + 16);
    if (k == 0 || u == 0 || v == 0) throw Error(errc::dim_mismatch, "tensor dims must be >= 1");

    const std::uint64_t n = static_cast<std::uint64_t>(k) * u * v;
    if (n > kMaxElements) throw Error(errc::dim_mismatch, "tensor too large");
    const std::uint64_t payload = bytes.size() - 20;
    if (payload != n * 4)
        throw Error(errc::dim_mismatch, "payload is " + std::to_string(payload) + " bytes, expected " +
                                            std::to_string(n * 4));

    Tensor3 t;
    t.channels = k;
    t.height = u;
    t.width = v;
    t.data.resize(static_cast<std::size_t>(n));
    const std::uint8_t* p = bytes.data() + 20;
    for (std::size_t i = 0; i < t.data.size(); ++i, p += 4) {
        const float f = std::bit_cast<float>(read_u32le(p));
        if (!std::isfinite(f))
            throw Error(errc::non_finite, "non-finite value at element " + std::to_string(i));
        t.data[i] = f;
    }
    return t;
}

std::vector<std::uint8_t> write_tensor(const Tensor3& t) {
    validate_tensor(t);
    std::vector<std::uint8_t> out;
    out.reserve(20 + t.data.size() * 4);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32le(kNdim, out);
    put_u32le(t.channels, out);
    put_u32le(t.height, out);
    put_u32le(t.width, out);
    for (float f : t.data) put_u32le(std::bit_cast<std::uint32_t>(f), out);
    return out;
}

Tensor3 read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(errc::io_error, "read failed for " + path.string());
    return parse_tensor(bytes);
}

void write_tensor_file(const Tensor3& t, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = write_tensor(t);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(errc::io_error, "write failed for " + path.string());
}

} // namespace restorex
