#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "specklepuf/grid.hpp"
#include "specklepuf/optics.hpp"

namespace specklepuf {

/// Binary greymap (P5). maxval <= 255 uses one byte per sample, larger
/// maxval two bytes big-endian.
struct GrayImage {
  Grid<std::uint16_t> pixels;
  std::uint16_t maxval = 255;
};

GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

GrayImage to_image(const SpecklePattern& pattern);
/// Imports a greymap as a detector frame; bits are inferred from maxval.
SpecklePattern from_image(const GrayImage& image);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace specklepuf
