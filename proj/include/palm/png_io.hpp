/**
 * @file png_io.hpp
 * @brief PNG encode/decode for 8-bit gray and RGB rasters (libpng)
 */
#pragma once

#include <palm/imaging.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace palm {

/// Decodes any PNG to 8-bit gray or RGB (alpha dropped, palette expanded). Throws BadImage.
Image decode_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_png(const Image& img);

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace palm
