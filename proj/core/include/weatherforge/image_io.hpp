#pragma once

#include <cstdint>
#include <filesystem>

#include "weatherforge/image.hpp"

namespace weatherforge {

// Reads an 8- or 16-bit 3-channel PNG or a color PFM ("PF"), detected by
// magic bytes. Integer samples map linearly to [0,1] (v/255 or v/65535);
// PFM samples are taken as stored and clamped to [0,1].
// Throws IoError for unreadable/truncated files, FormatError for unsupported
// bit depths or channel counts.
Image read_image(const std::filesystem::path& path);

// Writes a PNG at the given bit depth (8 or 16) with round-to-nearest-even
// quantization, so write+read round-trips within 1/(2*(2^bits-1)) per sample.
void write_image(const Image& img, const std::filesystem::path& path,
                 int bit_depth = 8);

// Writes a 3-channel PFM ("PF", little-endian, scanlines bottom-up). Floats
// stored exactly; read_image restores them bit-identically.
void write_image_pfm(const Image& img, const std::filesystem::path& path);

// Single-channel PFM ("Pf") used for depth/transmission/alpha maps. Full
// float precision preserved; the round-trip is bit-identical. No range
// clamping here: range constraints belong to the owning module.
ScalarMap read_scalar_map(const std::filesystem::path& path);
void write_scalar_map(const ScalarMap& map, const std::filesystem::path& path);

// Quantization used by write_image, exposed for tests. Round half to even:
// quantize8(0.5) == 128 since round(127.5) ties to the even neighbor.
std::uint8_t quantize8(float s);
std::uint16_t quantize16(float s);

}  // namespace weatherforge
