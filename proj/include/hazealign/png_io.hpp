#pragma once

#include <filesystem>

#include "hazealign/image.hpp"

namespace hazealign {

/// Decodes an 8-bit RGB PNG. Any other bit depth or color type (grayscale,
/// palette, alpha) is rejected rather than converted. Ancillary chunks such
/// as gAMA are ignored; samples are returned exactly as stored.
ImageBuffer load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG, creating parent directories as needed.
void save_image(const ImageBuffer& image, const std::filesystem::path& path);

}  // namespace hazealign
