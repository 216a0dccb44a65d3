#include "specorr/features.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "specorr/log.hpp"
#include "specorr/textio.hpp"

namespace specorr {

namespace {

void check_grid(const ImageRaster& raster, const InterestPointGrid& grid, const char* op) {
    const bool ok = grid.patch_size >= 4 && grid.rows >= 1 && grid.cols >= 1 &&
                    grid.rows == raster.height / grid.patch_size &&
                    grid.cols == raster.width / grid.patch_size &&
                    grid.count() == static_cast<int>(grid.centers.size());
    if (!ok) throw std::invalid_argument(std::string(op) + ": grid does not match raster");
}

// Central differences with clamped (replicated) borders over the whole image.
void central_gradients(const ImageRaster& img, std::vector<double>& gx, std::vector<double>& gy) {
    const int w = img.width, h = img.height;
    gx.assign(static_cast<std::size_t>(w) * h, 0.0);
    gy.assign(static_cast<std::size_t>(w) * h, 0.0);
    for (int y = 0; y < h; ++y) {
        const int yn = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xn = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = (img.at(xp, y) - img.at(xn, y)) / 2.0;
            gy[i] = (img.at(x, yp) - img.at(x, yn)) / 2.0;
        }
    }
}

// Maps a file coordinate to its grid index; centers are at least patch_size
// apart so at most one center can be within 0.5 px.
int grid_index_for(const InterestPointGrid& grid, double x, double y, const std::string& context) {
    const double p = grid.patch_size;
    const int c = static_cast<int>(std::lround(x / p - 0.5));
    const int r = static_cast<int>(std::lround(y / p - 0.5));
    if (r < 0 || r >= grid.rows || c < 0 || c >= grid.cols)
        throw std::runtime_error(context + ": coordinate (" + std::to_string(x) + ", " +
                                 std::to_string(y) + ") does not match any grid center");
    const Point ctr = grid.center(r, c);
    if (std::abs(x - ctr.x) > 0.5 || std::abs(y - ctr.y) > 0.5)
        throw std::runtime_error(context + ": coordinate (" + std::to_string(x) + ", " +
                                 std::to_string(y) + ") does not match any grid center");
    return r * grid.cols + c;
}

} // namespace

InterestPointGrid tessellate(const ImageRaster& raster, int patch_size) {
    if (patch_size < 4) throw std::invalid_argument("tessellate: patch_size must be >= 4");
    if (!raster.valid()) throw std::invalid_argument("tessellate: invalid raster");
    if (raster.width < patch_size || raster.height < patch_size)
        throw std::invalid_argument("tessellate: patch_size " + std::to_string(patch_size) +
                                    " too large for " + std::to_string(raster.width) + "x" +
                                    std::to_string(raster.height) + " raster");
    InterestPointGrid grid;
    grid.patch_size = patch_size;
    grid.cols = raster.width / patch_size;
    grid.rows = raster.height / patch_size;
    grid.centers.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            grid.centers.push_back({(c + 0.5) * patch_size, (r + 0.5) * patch_size});
    return grid;
}

DescriptorSet mpi_descriptor(const ImageRaster& raster, const InterestPointGrid& grid) {
    check_grid(raster, grid, "mpi_descriptor");
    DescriptorSet set;
    set.n = grid.count();
    set.d = 1;
    set.kind = DescriptorKind::mpi;
    set.values.reserve(set.n);
    const int p = grid.patch_size;
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            long sum = 0;
            for (int y = r * p; y < (r + 1) * p; ++y)
                for (int x = c * p; x < (c + 1) * p; ++x) sum += raster.at(x, y);
            const double mean = static_cast<double>(sum) / (static_cast<double>(p) * p);
            set.values.push_back(mean / 255.0);
        }
    }
    return set;
}

DescriptorSet hog_descriptor(const ImageRaster& raster, const InterestPointGrid& grid) {
    check_grid(raster, grid, "hog_descriptor");
    constexpr int kBins = 9;
    std::vector<double> gx, gy;
    central_gradients(raster, gx, gy);

    DescriptorSet set;
    set.n = grid.count();
    set.d = kBins;
    set.kind = DescriptorKind::hog;
    set.values.assign(static_cast<std::size_t>(set.n) * kBins, 0.0);

    const int p = grid.patch_size;
    const double pi = std::numbers::pi;
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            double* hist = set.values.data() + static_cast<std::size_t>(r * grid.cols + c) * kBins;
            for (int y = r * p; y < (r + 1) * p; ++y) {
                for (int x = c * p; x < (c + 1) * p; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * raster.width + x;
                    const double mag = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
                    if (mag == 0.0) continue;
                    double theta = std::atan2(gy[i], gx[i]); // unsigned orientation
                    if (theta < 0.0) theta += pi;
                    if (theta >= pi) theta -= pi;
                    int bin = static_cast<int>(theta * kBins / pi);
                    if (bin >= kBins) bin = kBins - 1;
                    hist[bin] += mag;
                }
            }
            double norm2 = 0.0;
            for (int b = 0; b < kBins; ++b) norm2 += hist[b] * hist[b];
            if (norm2 > 0.0) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (int b = 0; b < kBins; ++b) hist[b] *= inv;
            }
        }
    }
    return set;
}

DescriptorSet load_descriptors(const std::string& path, const InterestPointGrid& grid) {
    const auto lines = textio::read_data_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty descriptor file");

    const auto header = textio::split_ws(lines[0].text);
    if (header.size() != 2)
        throw std::runtime_error(path + ":" + std::to_string(lines[0].number) +
                                 ": expected header 'n d'");
    const std::string ctx0 = path + ":" + std::to_string(lines[0].number);
    const long n = textio::parse_long(header[0], ctx0);
    const long d = textio::parse_long(header[1], ctx0);
    if (n != grid.count())
        throw std::runtime_error(path + ": descriptor count mismatch (file declares " +
                                 std::to_string(n) + ", grid has " + std::to_string(grid.count()) + ")");
    if (d < 1) throw std::runtime_error(path + ": descriptor dimension must be >= 1");
    if (static_cast<long>(lines.size()) - 1 != n)
        throw std::runtime_error(path + ": descriptor count mismatch (header declares " +
                                 std::to_string(n) + ", file has " +
                                 std::to_string(lines.size() - 1) + " records)");

    DescriptorSet set;
    set.n = static_cast<int>(n);
    set.d = static_cast<int>(d);
    set.kind = DescriptorKind::external;
    set.values.assign(static_cast<std::size_t>(n) * d, 0.0);
    std::vector<char> filled(static_cast<std::size_t>(n), 0);

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string ctx = path + ":" + std::to_string(lines[li].number);
        const auto toks = textio::split_ws(lines[li].text);
        if (static_cast<long>(toks.size()) != d + 2)
            throw std::runtime_error(ctx + ": expected 'x y' plus " + std::to_string(d) + " values");
        const double x = textio::parse_double(toks[0], ctx);
        const double y = textio::parse_double(toks[1], ctx);
        const int idx = grid_index_for(grid, x, y, ctx);
        if (filled[idx]) throw std::runtime_error(ctx + ": duplicate descriptor for grid center");
        filled[idx] = 1;
        for (long k = 0; k < d; ++k) {
            const double v = textio::parse_double(toks[2 + k], ctx);
            if (!std::isfinite(v)) throw std::runtime_error(ctx + ": non-finite value");
            set.values[static_cast<std::size_t>(idx) * d + k] = v;
        }
    }
    for (long i = 0; i < n; ++i)
        if (!filled[i]) throw std::runtime_error(path + ": no descriptor for grid point " + std::to_string(i));
    return set;
}

SaliencyMap gradient_saliency(const ImageRaster& raster, const InterestPointGrid& grid) {
    check_grid(raster, grid, "gradient_saliency");
    std::vector<double> gx, gy;
    central_gradients(raster, gx, gy);

    SaliencyMap map;
    map.n = grid.count();
    map.scores.reserve(map.n);
    const int p = grid.patch_size;
    double max_raw = 0.0;
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            double sum = 0.0;
            for (int y = r * p; y < (r + 1) * p; ++y) {
                for (int x = c * p; x < (c + 1) * p; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * raster.width + x;
                    sum += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
                }
            }
            const double raw = sum / (static_cast<double>(p) * p);
            map.scores.push_back(raw);
            max_raw = std::max(max_raw, raw);
        }
    }
    if (max_raw > 0.0)
        for (double& s : map.scores) s /= max_raw;
    return map;
}

SaliencyMap load_saliency(const std::string& path, const InterestPointGrid& grid) {
    const auto lines = textio::read_data_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty saliency file");

    const auto header = textio::split_ws(lines[0].text);
    if (header.size() != 1)
        throw std::runtime_error(path + ":" + std::to_string(lines[0].number) + ": expected header 'n'");
    const long n = textio::parse_long(header[0], path + ":" + std::to_string(lines[0].number));
    if (n != grid.count())
        throw std::runtime_error(path + ": saliency count mismatch (file declares " + std::to_string(n) +
                                 ", grid has " + std::to_string(grid.count()) + ")");
    if (static_cast<long>(lines.size()) - 1 != n)
        throw std::runtime_error(path + ": saliency count mismatch (header declares " + std::to_string(n) +
                                 ", file has " + std::to_string(lines.size() - 1) + " records)");

    SaliencyMap map;
    map.n = static_cast<int>(n);
    map.scores.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<char> filled(static_cast<std::size_t>(n), 0);

    constexpr double kSlack = 1e-6;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string ctx = path + ":" + std::to_string(lines[li].number);
        const auto toks = textio::split_ws(lines[li].text);
        if (toks.size() != 3) throw std::runtime_error(ctx + ": expected 'x y s'");
        const double x = textio::parse_double(toks[0], ctx);
        const double y = textio::parse_double(toks[1], ctx);
        double s = textio::parse_double(toks[2], ctx);
        if (!std::isfinite(s)) throw std::runtime_error(ctx + ": non-finite value");
        if (s < -kSlack || s > 1.0 + kSlack)
            throw std::runtime_error(ctx + ": saliency out of range (" + toks[2] + ")");
        if (s < 0.0 || s > 1.0) {
            warn(ctx + ": saliency " + toks[2] + " clamped to [0,1]");
            s = std::min(1.0, std::max(0.0, s));
        }
        const int idx = grid_index_for(grid, x, y, ctx);
        if (filled[idx]) throw std::runtime_error(ctx + ": duplicate saliency for grid center");
        filled[idx] = 1;
        map.scores[idx] = s;
    }
    for (long i = 0; i < n; ++i)
        if (!filled[i]) throw std::runtime_error(path + ": no saliency for grid point " + std::to_string(i));
    return map;
}

} // namespace specorr
