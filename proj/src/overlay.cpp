#include "specorr/overlay.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace specorr {

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

constexpr Rgb kSelected{40, 200, 60};
constexpr Rgb kRejected{150, 150, 150};
constexpr Rgb kValid{40, 200, 60};
constexpr Rgb kInvalid{220, 50, 40};

void put(OverlayImage& img, int x, int y, Rgb c) {
    if (x < 0 || x >= img.width || y < 0 || y >= img.height) return;
    const std::size_t i = (static_cast<std::size_t>(y) * img.width + x) * 3;
    img.rgb[i] = c.r;
    img.rgb[i + 1] = c.g;
    img.rgb[i + 2] = c.b;
}

void draw_dot(OverlayImage& img, int x, int y, Rgb c) {
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) put(img, x + dx, y + dy, c);
}

void draw_line(OverlayImage& img, int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        put(img, x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

} // namespace

OverlayImage render_overlay(const ImageRaster& a, const ImageRaster& b,
                            const CorrespondenceSet& set, const GroundTruth* gt,
                            double valid_window) {
    if (!a.valid() || !b.valid()) throw std::invalid_argument("render_overlay: invalid raster");
    OverlayImage img;
    img.width = a.width + b.width;
    img.height = std::max(a.height, b.height);
    img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 24);

    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            const std::uint8_t v = a.at(x, y);
            put(img, x, y, {v, v, v});
        }
    for (int y = 0; y < b.height; ++y)
        for (int x = 0; x < b.width; ++x) {
            const std::uint8_t v = b.at(x, y);
            put(img, a.width + x, y, {v, v, v});
        }

    const double half = valid_window / 2.0;
    for (const CorrespondencePair& p : set.pairs) {
        Rgb color;
        if (gt) {
            // nearest ground-truth source decides which target to validate against
            const PointPair* nearest = nullptr;
            double best = 0.0;
            for (const PointPair& g : gt->pairs) {
                const double d = std::hypot(g.first.x - p.source.x, g.first.y - p.source.y);
                if (!nearest || d < best) {
                    nearest = &g;
                    best = d;
                }
            }
            const bool ok = nearest && std::abs(p.target.x - nearest->second.x) <= half &&
                            std::abs(p.target.y - nearest->second.y) <= half;
            color = ok ? kValid : kInvalid;
        } else {
            color = p.selected ? kSelected : kRejected;
        }
        const int x0 = static_cast<int>(std::lround(p.source.x));
        const int y0 = static_cast<int>(std::lround(p.source.y));
        const int x1 = a.width + static_cast<int>(std::lround(p.target.x));
        const int y1 = static_cast<int>(std::lround(p.target.y));
        draw_line(img, x0, y0, x1, y1, color);
        draw_dot(img, x0, y0, color);
        draw_dot(img, x1, y1, color);
    }
    return img;
}

} // namespace specorr
