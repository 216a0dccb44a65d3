#include "specorr/image.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "specorr/log.hpp"

namespace specorr {

namespace {

// Header fields may be separated by whitespace and '#' comments running to
// end of line. Used for both header tokens and ASCII pixel data.
int next_ascii_int(std::istream& in, const std::string& name, const char* what) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF) throw std::runtime_error(name + ": truncated while reading " + what);
    if (!std::isdigit(c)) throw std::runtime_error(name + ": malformed header near " + std::string(what));
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1'000'000'000L) throw std::runtime_error(name + ": numeric overflow in " + what);
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(value);
}

std::uint8_t to_luminance(int r, int g, int b) {
    return static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
}

} // namespace

ImageRaster decode_pnm(std::istream& in, const std::string& name) {
    char p = 0, digit = 0;
    in.get(p);
    in.get(digit);
    if (!in || p != 'P' || (digit != '2' && digit != '3' && digit != '5' && digit != '6'))
        throw std::runtime_error(name + ": not a supported PGM/PPM file (need P2, P3, P5 or P6)");
    const bool color = (digit == '3' || digit == '6');
    const bool binary = (digit == '5' || digit == '6');

    const int width = next_ascii_int(in, name, "width");
    const int height = next_ascii_int(in, name, "height");
    const int maxval = next_ascii_int(in, name, "maxval");
    if (width <= 0 || height <= 0) throw std::runtime_error(name + ": non-positive dimensions");
    if (maxval < 1 || maxval > 255) throw std::runtime_error(name + ": unsupported maxval " + std::to_string(maxval));

    const std::size_t n = static_cast<std::size_t>(width) * height;
    const std::size_t samples = color ? n * 3 : n;
    std::vector<std::uint8_t> raw(samples);

    if (binary) {
        // Exactly one whitespace byte separates the header from the body.
        int sep = in.get();
        if (sep == EOF || !std::isspace(sep)) throw std::runtime_error(name + ": malformed header");
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(samples));
        if (static_cast<std::size_t>(in.gcount()) != samples)
            throw std::runtime_error(name + ": truncated body");
        for (std::uint8_t v : raw)
            if (v > maxval)
                throw std::runtime_error(name + ": pixel value " + std::to_string(v) +
                                         " exceeds declared maxval " + std::to_string(maxval));
    } else {
        for (std::size_t i = 0; i < samples; ++i) {
            const int v = next_ascii_int(in, name, "pixel data");
            if (v > maxval)
                throw std::runtime_error(name + ": pixel value " + std::to_string(v) +
                                         " exceeds declared maxval " + std::to_string(maxval));
            raw[i] = static_cast<std::uint8_t>(v);
        }
    }

    ImageRaster img;
    img.width = width;
    img.height = height;
    img.intensity.resize(n);
    if (color) {
        for (std::size_t i = 0; i < n; ++i)
            img.intensity[i] = to_luminance(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    } else {
        img.intensity = std::move(raw);
    }
    return img;
}

ImageRaster load_raster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    return decode_pnm(in, path);
}

void write_pgm(const std::string& path, const ImageRaster& img) {
    if (!img.valid()) throw std::invalid_argument("write_pgm: invalid raster");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "P2\n" << img.width << " " << img.height << "\n255\n";
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            out << static_cast<int>(img.at(x, y));
            out << (x + 1 == img.width ? '\n' : ' ');
        }
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& rgb) {
    if (width <= 0 || height <= 0 ||
        rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw std::invalid_argument("write_ppm: buffer does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "P3\n" << width << " " << height << "\n255\n";
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
            out << static_cast<int>(rgb[i]) << ' ' << static_cast<int>(rgb[i + 1]) << ' '
                << static_cast<int>(rgb[i + 2]);
            out << (x + 1 == width ? '\n' : ' ');
        }
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

ImageRaster downsample2(const ImageRaster& src) {
    ImageRaster dst;
    dst.width = (src.width + 1) / 2;
    dst.height = (src.height + 1) / 2;
    dst.intensity.resize(static_cast<std::size_t>(dst.width) * dst.height);
    for (int y = 0; y < dst.height; ++y) {
        const int y0 = 2 * y;
        const int y1 = std::min(2 * y + 1, src.height - 1);
        for (int x = 0; x < dst.width; ++x) {
            const int x0 = 2 * x;
            const int x1 = std::min(2 * x + 1, src.width - 1);
            const int sum = src.at(x0, y0) + src.at(x1, y0) + src.at(x0, y1) + src.at(x1, y1);
            dst.at(x, y) = static_cast<std::uint8_t>(std::lround(sum / 4.0));
        }
    }
    return dst;
}

} // namespace

Pyramid build_pyramid(const ImageRaster& raster, int levels, int min_dim) {
    if (levels < 1) throw std::invalid_argument("build_pyramid: levels must be >= 1");
    if (!raster.valid()) throw std::invalid_argument("build_pyramid: invalid raster");
    if (min_dim < 1) min_dim = 1;

    int allowed = 1;
    {
        int w = raster.width, h = raster.height;
        while (allowed < levels) {
            const int w2 = (w + 1) / 2;
            const int h2 = (h + 1) / 2;
            if (w2 < min_dim || h2 < min_dim) break;
            w = w2;
            h = h2;
            ++allowed;
        }
    }
    if (allowed < levels) {
        warn("build_pyramid: clamping levels from " + std::to_string(levels) + " to " +
             std::to_string(allowed) + " so the coarsest level keeps at least " +
             std::to_string(min_dim) + " px per side");
        levels = allowed;
    }

    Pyramid p;
    p.levels.push_back(raster);
    for (int k = 1; k < levels; ++k) p.levels.push_back(downsample2(p.levels.back()));
    return p;
}

} // namespace specorr
