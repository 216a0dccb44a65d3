#pragma once

#include <cstdint>
#include <string>

#include "specorr/image.hpp"

namespace specorr {

// Deterministic textured test image: hashed value noise, box-smoothed, with
// low-frequency intensity ramps so patches stay pairwise distinct.
ImageRaster procedural_texture(int width, int height, std::uint64_t seed);

struct SynthConfig {
    int pairs_easy = 10;
    int pairs_difficult = 10;
    int width = 128;
    int height = 128;
    int patch_size = 16; // ground-truth points sit on patch centers
    int gt_points = 8;
    std::uint64_t seed = 1;
};

// Writes images, annotation files and a manifest with declared difficulties
// under out_dir. Easy pairs are similarity warps (the ground truth is
// homography-consistent); difficult pairs render a two-plane scene whose two
// homographies defeat any single fit. Returns the manifest path.
std::string generate_synthetic_dataset(const std::string& out_dir, const SynthConfig& config);

} // namespace specorr
