#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "netgrab/raster.hpp"

namespace netgrab {

// PNG input. Grayscale and palette images are expanded to RGB; alpha is
// composited over white.
RgbImage load_png(const std::filesystem::path& path);
RgbImage decode_png(std::span<const std::uint8_t> bytes);

GrayImage load_gray_png(const std::filesystem::path& path);
/// Gray level > 127 is foreground.
BinaryImage load_binary_png(const std::filesystem::path& path);

// PNG output. Binary images are written as 8-bit gray, foreground 255.
void save_png(const RgbImage& image, const std::filesystem::path& path);
void save_png(const GrayImage& image, const std::filesystem::path& path);
void save_png(const BinaryImage& image, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const RgbImage& image);
std::vector<std::uint8_t> encode_png(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const BinaryImage& image);

/// True when the buffer starts with the 8-byte PNG signature.
bool has_png_signature(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace netgrab
