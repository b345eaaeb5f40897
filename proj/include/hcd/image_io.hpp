#pragma once

#include <filesystem>

#include "hcd/image.hpp"

namespace hcd {

// Supported containers: PNG (8/16-bit, gray or RGB, no alpha/palette)
// and binary PPM/PGM. Format is sniffed from the file contents on load
// and taken from the extension on save (.png/.ppm/.pgm). Byte-level
// details live in docs/formats.md.
Image load_image(const std::filesystem::path& path);

// bit_depth is 8 or 16 (PPM/PGM are always written 8-bit, maxval 255).
// Pixels are quantized to round(v * (2^depth - 1)).
void save_image(const Image& img, const std::filesystem::path& path,
                int bit_depth = 8);

}  // namespace hcd
