#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specorr/matrix.hpp"

namespace specorr {

// Planar homography, normalized so H(2,2) = 1 when that entry is usable,
// otherwise to unit Frobenius norm with the largest-magnitude entry positive.
struct Homography {
    Mat h; // 3x3

    Homography() : h(Mat::identity(3)) {}
    explicit Homography(Mat m) : h(std::move(m)) {}
};

using PointPair = std::pair<Point, Point>; // (source, target)

// Direct linear transform on isotropically normalized coordinates (centroids
// to the origin, mean distance sqrt(2)). Needs >= 4 pairs and a
// non-degenerate configuration.
Homography estimate_homography(std::span<const PointPair> pairs);

struct ProjectedPoint {
    double x = 0.0;
    double y = 0.0;
    bool at_infinity = false;
};

std::vector<ProjectedPoint> interpolate_keypoints(const Homography& h, std::span<const Point> points);

Homography homography_inverse(const Homography& h);

enum class Difficulty { easy, difficult };

// easy iff every ground-truth source reprojects within rho pixels of its
// target; any source mapping to infinity makes the pair difficult.
Difficulty classify_pair(const Homography& h, std::span<const PointPair> gt_pairs, double rho);

// 3 lines of 3 decimal numbers, row-major.
void write_homography(const std::string& path, const Homography& h);
Homography read_homography(const std::string& path);

} // namespace specorr
