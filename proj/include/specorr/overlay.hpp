#pragma once

#include <cstdint>
#include <vector>

#include "specorr/image.hpp"
#include "specorr/metrics.hpp"
#include "specorr/optimizer.hpp"

namespace specorr {

struct OverlayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; // interleaved, width*height*3
};

// Side-by-side canvas with one line per correspondence. Without ground
// truth, selected pairs draw green and rejected pairs gray. With ground
// truth, pairs whose target falls within a valid_window x valid_window box
// centered on the nearest ground-truth target draw green, others red.
OverlayImage render_overlay(const ImageRaster& a, const ImageRaster& b,
                            const CorrespondenceSet& set, const GroundTruth* gt = nullptr,
                            double valid_window = 15.0);

} // namespace specorr
