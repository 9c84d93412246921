#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace restorex {

/// Dense rank-3 float tensor (channels x height x width), row-major with
/// width fastest. Holds convolutional feature maps and the gradients
/// back-propagated onto them; both sides of a Grad-CAM input pair use this
/// one shape.
struct Tensor3 {
    std::uint32_t channels = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<float> data; // size == channels * height * width

    std::size_t size() const { return data.size(); }

    std::size_t index(std::uint32_t c, std::uint32_t y, std::uint32_t x) const {
        return (static_cast<std::size_t>(c) * height + y) * width + x;
    }

    float at(std::uint32_t c, std::uint32_t y, std::uint32_t x) const { return data[index(c, y, x)]; }
    float& at(std::uint32_t c, std::uint32_t y, std::uint32_t x) { return data[index(c, y, x)]; }

    bool operator==(const Tensor3&) const = default;
};

/// Zero-filled tensor with validated dimensions.
Tensor3 make_tensor(std::uint32_t channels, std::uint32_t height, std::uint32_t width);

/// Throws unless dims are >= 1, the data length matches, and all values are
/// finite.
void validate_tensor(const Tensor3& t);

/// RXT1 container: magic "RXT1", u32-LE ndim (must be 3), 3x u32-LE dims
/// (channels, height, width), then channels*height*width IEEE-754 f32-LE
/// values, row-major with width fastest. Endianness is fixed so files
/// round-trip bit-exactly across machines.
Tensor3 parse_tensor(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> write_tensor(const Tensor3& t);

Tensor3 read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const Tensor3& t, const std::filesystem::path& path);

} // namespace restorex
