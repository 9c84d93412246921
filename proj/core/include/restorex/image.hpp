#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace restorex {

/// 8-bit RGB image, row-major, 3 bytes per pixel.
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // size == width * height * 3

    std::size_t index(int x, int y, int channel) const {
        return (static_cast<std::size_t>(y) * width + x) * 3 + channel;
    }
    std::uint8_t at(int x, int y, int channel) const { return pixels[index(x, y, channel)]; }
    std::uint8_t& at(int x, int y, int channel) { return pixels[index(x, y, channel)]; }

    bool operator==(const Image8&) const = default;
};

Image8 make_image(int width, int height, std::uint8_t fill = 0);

/// Decode a PNG file to 8-bit RGB. Grayscale, palette and alpha inputs are
/// expanded/flattened; throws io_error on anything unreadable.
Image8 read_png(const std::filesystem::path& path);

/// Encode as 8-bit RGB PNG with fixed settings, so identical pixels produce
/// identical bytes.
void write_png(const Image8& image, const std::filesystem::path& path);

} // namespace restorex
