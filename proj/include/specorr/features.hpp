#pragma once

#include <span>
#include <string>
#include <vector>

#include "specorr/image.hpp"
#include "specorr/matrix.hpp"

namespace specorr {

// Regular rectangular tessellation of an image into patch_size^2 patches.
// Trailing strips that do not fit a whole patch are discarded, so every
// center lies strictly inside the image.
struct InterestPointGrid {
    int patch_size = 0;
    int rows = 0;
    int cols = 0;
    std::vector<Point> centers; // row-major, center of patch (r,c)

    int count() const { return rows * cols; }
    Point center(int r, int c) const { return centers[static_cast<std::size_t>(r) * cols + c]; }
};

enum class DescriptorKind { mpi, hog, external };

// One appearance descriptor row per grid point, grid order.
struct DescriptorSet {
    int n = 0;
    int d = 0;
    DescriptorKind kind = DescriptorKind::external;
    std::vector<double> values; // n rows of d entries

    std::span<const double> row(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
    }
};

// Per-point scores in [0,1]; 1 = most salient.
struct SaliencyMap {
    int n = 0;
    std::vector<double> scores;
};

InterestPointGrid tessellate(const ImageRaster& raster, int patch_size);

// d=1, entry = mean patch intensity / 255.
DescriptorSet mpi_descriptor(const ImageRaster& raster, const InterestPointGrid& grid);

// d=9. Central-difference gradients with replicated image borders, unsigned
// orientation hard-binned into 9 bins over [0,180) weighted by magnitude,
// then L2-normalized per patch (all-zero row for zero-gradient patches).
DescriptorSet hog_descriptor(const ImageRaster& raster, const InterestPointGrid& grid);

// File format: first data line "n d", then n lines "x y v1 ... vd".
// Lines starting with '#' are comments. Records may appear in any order;
// each (x,y) must match a grid center within 0.5 px.
DescriptorSet load_descriptors(const std::string& path, const InterestPointGrid& grid);

// Built-in fallback: mean gradient magnitude per patch, scaled so the
// maximum score is 1 (all zeros for a constant image).
SaliencyMap gradient_saliency(const ImageRaster& raster, const InterestPointGrid& grid);

// File format: first data line "n", then n lines "x y s" with s in [0,1].
// Scores outside by at most 1e-6 are clamped with a warning.
SaliencyMap load_saliency(const std::string& path, const InterestPointGrid& grid);

} // namespace specorr
