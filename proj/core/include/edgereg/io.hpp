#pragma once

#include <string>

#include "edgereg/image.hpp"

namespace edgereg {

/// Reads a P2 (ASCII) or P5 (binary) PGM with maxval 255 or 65535.
/// Intensities are mapped to [0,1] by dividing by maxval.
Image2D load_pgm(const std::string& path);

/// Writes a P5 PGM. Intensities must lie in [0,1]; values are quantized
/// by round(v * maxval). 16-bit payloads are big-endian per the PGM spec.
void save_pgm(const Image2D& img, const std::string& path, int maxval = 255);

/// Label rasters ride on PGM with raw gray values as labels (no scaling).
LabelMap2D load_label_pgm(const std::string& path);
void save_label_pgm(const LabelMap2D& labels, const std::string& path);

/// "EDR1" displacement/velocity field format:
///   magic "EDR1", u32 width, u32 height, u32 channels (=2),
///   then width*height*2 little-endian f32, row-major, (dx,dy) interleaved.
VectorField2D read_field(const std::string& path);
void write_field(const VectorField2D& field, const std::string& path);

} // namespace edgereg
