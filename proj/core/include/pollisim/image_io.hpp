#pragma once

#include <string>

#include "pollisim/image.hpp"

namespace pollisim {

// Binary netpbm I/O. Color frames are P6 portable pixmaps; depth maps are
// 16-bit P5 portable graymaps (big-endian samples) holding whole millimeters
// with 0 as the no-return sentinel.

void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);

void write_pgm16(const DepthMap& depth, const std::string& path);
DepthMap read_pgm16(const std::string& path);

}  // namespace pollisim
