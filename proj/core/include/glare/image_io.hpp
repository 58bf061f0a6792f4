#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "glare/raster.hpp"

namespace glare {

/// 8-bit single-channel image as decoded from disk.
struct Gray8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;
};

/// Decodes PNG/JPEG to RGB in [0,1]. InputError if missing, DecodeError if unreadable.
RgbImage read_rgb(const std::filesystem::path& path);
Gray8 read_gray8(const std::filesystem::path& path);

/// 8-bit PNG writers; float values are mapped with floor(v * 255 + 0.5) after clamping to [0,1].
void write_png(const std::filesystem::path& path, const Raster& raster);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

/// Planar float32 dump: "GLRF", u32 channels, u32 height, u32 width, then
/// channels*height*width little-endian floats.
void write_float_planar(const std::filesystem::path& path, const Raster& raster);
Raster read_float_planar(const std::filesystem::path& path);

/// Bilinear (pixel-center aligned) resize.
RgbImage resize_bilinear(const RgbImage& img, int height, int width);
/// Nearest-neighbour resize; keeps the mask strictly binary.
BinaryMask resize_nearest(const BinaryMask& mask, int height, int width);

/// 8-bit quantization used by the PNG writers.
std::uint8_t to_u8(double v) noexcept;

}  // namespace glare
