#include "specorr/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "specorr/geometry.hpp"

namespace specorr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash3(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0x9e3779b97f4a7c15ULL));
}

// Uniform draw in [lo, hi) from a counter-based stream.
double draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, double lo, double hi) {
    const std::uint64_t bits = hash3(seed, stream, counter);
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

double bilinear(const ImageRaster& img, double u, double v) {
    u = std::min(std::max(u, 0.0), static_cast<double>(img.width - 1));
    v = std::min(std::max(v, 0.0), static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = u - x0;
    const double fy = v - y0;
    const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

Point apply_h(const Mat& h, const Point& p) {
    const double w = h(2, 0) * p.x + h(2, 1) * p.y + h(2, 2);
    return {(h(0, 0) * p.x + h(0, 1) * p.y + h(0, 2)) / w,
            (h(1, 0) * p.x + h(1, 1) * p.y + h(1, 2)) / w};
}

Mat mul3(const Mat& a, const Mat& b) {
    Mat c(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

// Similarity or perspective map about the image center.
Mat make_transform(double scale, double angle_deg, double tx, double ty, double px, double py,
                   double cx, double cy) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    Mat to_origin = Mat::identity(3);
    to_origin(0, 2) = -cx;
    to_origin(1, 2) = -cy;
    Mat core = Mat::identity(3);
    core(0, 0) = scale * std::cos(a);
    core(0, 1) = -scale * std::sin(a);
    core(1, 0) = scale * std::sin(a);
    core(1, 1) = scale * std::cos(a);
    core(2, 0) = px;
    core(2, 1) = py;
    Mat back = Mat::identity(3);
    back(0, 2) = cx + tx;
    back(1, 2) = cy + ty;
    return mul3(back, mul3(core, to_origin));
}

ImageRaster warp(const ImageRaster& src, const Mat& inverse_map) {
    ImageRaster dst;
    dst.width = src.width;
    dst.height = src.height;
    dst.intensity.resize(src.intensity.size());
    for (int y = 0; y < dst.height; ++y) {
        for (int x = 0; x < dst.width; ++x) {
            const Point p = apply_h(inverse_map, {static_cast<double>(x), static_cast<double>(y)});
            dst.at(x, y) = static_cast<std::uint8_t>(std::lround(bilinear(src, p.x, p.y)));
        }
    }
    return dst;
}

ImageRaster warp_two_plane(const ImageRaster& src, const Mat& inv_left, const Mat& inv_right,
                           int seam_x) {
    ImageRaster dst;
    dst.width = src.width;
    dst.height = src.height;
    dst.intensity.resize(src.intensity.size());
    for (int y = 0; y < dst.height; ++y) {
        for (int x = 0; x < dst.width; ++x) {
            const Mat& inv = x < seam_x ? inv_left : inv_right;
            const Point p = apply_h(inv, {static_cast<double>(x), static_cast<double>(y)});
            dst.at(x, y) = static_cast<std::uint8_t>(std::lround(bilinear(src, p.x, p.y)));
        }
    }
    return dst;
}

void write_annotations(const std::string& path, const std::vector<PointPair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    char buf[128];
    for (const auto& [s, t] : pairs) {
        std::snprintf(buf, sizeof buf, "%.4f %.4f %.4f %.4f\n", s.x, s.y, t.x, t.y);
        out << buf;
    }
}

// Interior patch centers in row-major order, skipping the border ring.
std::vector<Point> interior_centers(int width, int height, int patch) {
    std::vector<Point> centers;
    const int cols = width / patch;
    const int rows = height / patch;
    for (int r = 1; r + 1 < rows; ++r)
        for (int c = 1; c + 1 < cols; ++c)
            centers.push_back({(c + 0.5) * patch, (r + 0.5) * patch});
    return centers;
}

} // namespace

ImageRaster procedural_texture(int width, int height, std::uint64_t seed) {
    if (width < 1 || height < 1) throw std::invalid_argument("procedural_texture: bad dimensions");

    // Oriented sinusoidal gratings on a 16 px cell lattice. Per-cell angle,
    // frequency, phase and mean keep gradient-histogram and mean-intensity
    // descriptors well spread across patches; a light noise overlay breaks
    // any residual cell duplicates.
    constexpr int kCell = 16;
    ImageRaster img;
    img.width = width;
    img.height = height;
    img.intensity.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::uint64_t cell = static_cast<std::uint64_t>(y / kCell) * 4096 +
                                       static_cast<std::uint64_t>(x / kCell);
            const double theta = draw(seed, 1, cell, 0.0, std::numbers::pi);
            const double freq = draw(seed, 2, cell, 0.35, 0.85);
            const double phase = draw(seed, 3, cell, 0.0, 2.0 * std::numbers::pi);
            const double amp = draw(seed, 4, cell, 40.0, 70.0);
            const double mean = draw(seed, 5, cell, 95.0, 160.0);
            const double wave =
                mean + amp * std::sin(freq * (x * std::cos(theta) + y * std::sin(theta)) + phase);
            const double noise = draw(seed, 6, static_cast<std::uint64_t>(y) * width + x, -6.0, 6.0);
            const double v = std::min(255.0, std::max(0.0, wave + noise));
            img.intensity[static_cast<std::size_t>(y) * width + x] =
                static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return img;
}

std::string generate_synthetic_dataset(const std::string& out_dir, const SynthConfig& config) {
    if (config.pairs_easy < 0 || config.pairs_difficult < 0 ||
        config.pairs_easy + config.pairs_difficult < 1)
        throw std::invalid_argument("synth: need at least one pair");
    if (config.gt_points < 5) throw std::invalid_argument("synth: gt_points must be >= 5");
    if (config.width < 4 * config.patch_size || config.height < 4 * config.patch_size)
        throw std::invalid_argument("synth: image too small for the patch size");

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::ofstream manifest(dir / "manifest.txt", std::ios::binary);
    if (!manifest) throw std::runtime_error(out_dir + ": cannot write manifest");
    manifest << "# pair_id path_a path_b annot_path difficulty\n";

    const double margin = config.patch_size;
    const auto in_bounds = [&](const Point& p) {
        return p.x >= margin && p.x <= config.width - margin && p.y >= margin &&
               p.y <= config.height - margin;
    };
    const double cx = config.width / 2.0;
    const double cy = config.height / 2.0;

    for (int i = 0; i < config.pairs_easy; ++i) {
        const std::uint64_t s = config.seed * 1000003ULL + i;
        char id[32];
        std::snprintf(id, sizeof id, "easy%02d", i + 1);

        const ImageRaster img_a = procedural_texture(config.width, config.height, s);
        Mat fwd;
        if (i % 2 == 0) {
            // pure integer translation, patch-aligned for every other pair
            const double step = (i % 4 == 0) ? config.patch_size : 5.0;
            const double tx = std::floor(draw(s, 7, 0, -1.0, 2.0)) * step;
            const double ty = std::floor(draw(s, 7, 1, -1.0, 2.0)) * step;
            fwd = make_transform(1.0, 0.0, tx, ty, 0.0, 0.0, cx, cy);
        } else {
            const double shift = std::min(10.0, config.width / 12.0);
            const double scale = draw(s, 8, 0, 0.96, 1.04);
            const double angle = draw(s, 8, 1, -2.5, 2.5);
            const double tx = draw(s, 8, 2, -shift, shift);
            const double ty = draw(s, 8, 3, -shift, shift);
            fwd = make_transform(scale, angle, tx, ty, 0.0, 0.0, cx, cy);
        }
        const Homography inv = homography_inverse(Homography(fwd));
        const ImageRaster img_b = warp(img_a, inv.h);

        std::vector<PointPair> gt;
        for (const Point& p : interior_centers(config.width, config.height, config.patch_size)) {
            const Point q = apply_h(fwd, p);
            if (in_bounds(q)) gt.emplace_back(p, q);
            if (static_cast<int>(gt.size()) == config.gt_points) break;
        }
        if (static_cast<int>(gt.size()) < 5)
            throw std::runtime_error(std::string("synth: too few valid ground-truth points for ") + id);
        if (classify_pair(estimate_homography(gt), gt, 10.0) != Difficulty::easy)
            throw std::runtime_error(std::string("synth: pair ") + id + " failed to classify easy");

        write_pgm((dir / (std::string(id) + "_a.pgm")).string(), img_a);
        write_pgm((dir / (std::string(id) + "_b.pgm")).string(), img_b);
        write_annotations((dir / (std::string(id) + "_gt.txt")).string(), gt);
        manifest << id << " " << id << "_a.pgm " << id << "_b.pgm " << id << "_gt.txt easy\n";
    }

    for (int i = 0; i < config.pairs_difficult; ++i) {
        const std::uint64_t s = config.seed * 2000003ULL + i;
        char id[32];
        std::snprintf(id, sizeof id, "diff%02d", i + 1);

        const ImageRaster img_a = procedural_texture(config.width, config.height, s + 500);

        // Two planes meeting at a vertical seam, warped by clearly different
        // homographies so no single fit reproduces the ground truth.
        const int seam = config.width / 2;
        const double dy = config.height / 6.0;
        const Mat h_left = make_transform(draw(s, 9, 0, 0.9, 1.1), draw(s, 9, 1, 5.0, 12.0),
                                          draw(s, 9, 2, -8.0, 8.0), draw(s, 9, 3, -8.0, 8.0),
                                          draw(s, 9, 4, 0.4e-3, 1.2e-3), draw(s, 9, 5, -1.2e-3, -0.4e-3),
                                          cx, cy);
        const Mat h_right = make_transform(draw(s, 10, 0, 0.9, 1.1), draw(s, 10, 1, -12.0, -5.0),
                                           draw(s, 10, 2, -8.0, 8.0), draw(s, 10, 3, 0.6 * dy, dy),
                                           draw(s, 10, 4, -1.2e-3, -0.4e-3), draw(s, 10, 5, 0.4e-3, 1.2e-3),
                                           cx, cy);
        const Mat inv_left = homography_inverse(Homography(h_left)).h;
        const Mat inv_right = homography_inverse(Homography(h_right)).h;
        const ImageRaster img_b = warp_two_plane(img_a, inv_left, inv_right, seam);

        // balance ground truth across the two planes so one homography can
        // never explain all of it
        std::vector<PointPair> left_pts, right_pts;
        for (const Point& p : interior_centers(config.width, config.height, config.patch_size)) {
            const Point ql = apply_h(h_left, p);
            const Point qr = apply_h(h_right, p);
            if (ql.x < seam - 2.0 && in_bounds(ql)) {
                left_pts.emplace_back(p, ql);
            } else if (qr.x >= seam + 2.0 && in_bounds(qr)) {
                right_pts.emplace_back(p, qr);
            }
        }
        std::vector<PointPair> gt;
        for (std::size_t k = 0; static_cast<int>(gt.size()) < config.gt_points; ++k) {
            const bool more_left = k < left_pts.size();
            const bool more_right = k < right_pts.size();
            if (!more_left && !more_right) break;
            if (more_left) gt.push_back(left_pts[k]);
            if (more_right && static_cast<int>(gt.size()) < config.gt_points)
                gt.push_back(right_pts[k]);
        }
        if (static_cast<int>(gt.size()) < 5 || left_pts.empty() || right_pts.empty())
            throw std::runtime_error(std::string("synth: too few valid ground-truth points for ") + id);
        if (classify_pair(estimate_homography(gt), gt, 10.0) != Difficulty::difficult)
            throw std::runtime_error(std::string("synth: pair ") + id + " failed to classify difficult");

        write_pgm((dir / (std::string(id) + "_a.pgm")).string(), img_a);
        write_pgm((dir / (std::string(id) + "_b.pgm")).string(), img_b);
        write_annotations((dir / (std::string(id) + "_gt.txt")).string(), gt);
        manifest << id << " " << id << "_a.pgm " << id << "_b.pgm " << id << "_gt.txt difficult\n";
    }

    if (!manifest) throw std::runtime_error(out_dir + ": manifest write failed");
    return (dir / "manifest.txt").string();
}

} // namespace specorr
