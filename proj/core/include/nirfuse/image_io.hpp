#pragma once

#include <string>

#include "nirfuse/image.hpp"

namespace nirfuse {

/// Loads an 8-bit PNG or binary PGM/PPM (maxval 255). The format is sniffed
/// from the file's magic bytes. Grayscale files yield channels=1, color
/// channels=3; pixel values are rescaled to [0,1].
ImagePlanar load_image(const std::string& path);

/// Writes img to path; the format follows the extension (.png, .pgm, .ppm).
/// Values are clamped to [0,1] before 8-bit quantization. PGM requires a
/// single-channel image, PPM a three-channel one; PNG accepts both.
void save_image(const ImagePlanar& img, const std::string& path);

}  // namespace nirfuse
