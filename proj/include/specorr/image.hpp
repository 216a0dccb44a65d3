#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace specorr {

// 8-bit grayscale raster, row-major, immutable once built.
struct ImageRaster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> intensity; // width*height values in [0,255]

    std::uint8_t at(int x, int y) const {
        return intensity[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return intensity[static_cast<std::size_t>(y) * width + x];
    }
    bool valid() const {
        return width > 0 && height > 0 &&
               intensity.size() == static_cast<std::size_t>(width) * height;
    }
};

// Level 0 is the finest (input) resolution; each coarser level halves the
// dimensions with ceil rounding.
struct Pyramid {
    static constexpr int factor = 2;
    std::vector<ImageRaster> levels;
};

// Reads PGM (P2/P5) and PPM (P3/P6). Color inputs are collapsed to luminance
// via round(0.299 R + 0.587 G + 0.114 B). Maxval must be in [1,255].
ImageRaster load_raster(const std::string& path);
ImageRaster decode_pnm(std::istream& in, const std::string& name);

void write_pgm(const std::string& path, const ImageRaster& img); // P2
// Interleaved RGB buffer of width*height*3 bytes, written as ASCII P3.
void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& rgb);

// Level k+1 is a 2x2 box-filter average of level k (edge pixels replicate,
// result rounded to nearest integer). `levels` is clamped down with a warning
// if a coarser level would fall below min_dim pixels in either dimension.
Pyramid build_pyramid(const ImageRaster& raster, int levels, int min_dim = 1);

} // namespace specorr
