// Thin PNG/PPM reader-writer for 8-bit images.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dla/raster.hpp"

namespace dla::imageio {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads a .png, .ppm (P6) or .pgm (P5) file; 16-bit and palette PNGs are
// expanded, alpha is dropped.
raster::Image read_image(const std::string& path);

void write_image(const std::string& path, const raster::Image& img);

// Writes a label map as an indexed (palette) PNG, one palette entry per class.
void write_indexed_png(const std::string& path, const raster::LabelMap& map);

}  // namespace dla::imageio
