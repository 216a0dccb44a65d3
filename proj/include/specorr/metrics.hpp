#pragma once

#include <optional>
#include <span>

#include "specorr/geometry.hpp"
#include "specorr/optimizer.hpp"

namespace specorr {

// Axis-aligned pixel box: x,y top-left, w,h positive extents.
struct RegionBox {
    long x = 0;
    long y = 0;
    long w = 0;
    long h = 0;

    long area() const { return w * h; }
};

// Pixel-set cardinalities for one image: tp = |pred ∩ gt|,
// tn = |gt \ pred| (ground truth missed), fp = |pred \ gt|.
struct OverlapCounts {
    long long tp = 0;
    long long tn = 0;
    long long fp = 0;

    long long total() const { return tp + tn + fp; }
    OverlapCounts operator+(const OverlapCounts& o) const { return {tp + o.tp, tn + o.tn, fp + o.fp}; }
};

OverlapCounts region_overlap_counts(const RegionBox& pred, const RegionBox& gt);

// R1 = TP/(TP+TN+FP) with both images' counts summed; 0/0 defined as 0.
double relevance_r1(const RegionBox& pred, const RegionBox& gt);
double relevance_r1(const RegionBox& pred_a, const RegionBox& pred_b, const RegionBox& gt_a,
                    const RegionBox& gt_b);

double mean_relevance(std::span<const double> scores);

// FP/(TP+TN+FP), the FP-share companion of R1.
double fpr_rate(const RegionBox& pred, const RegionBox& gt);
double fpr_rate(const RegionBox& pred_a, const RegionBox& pred_b, const RegionBox& gt_a,
                const RegionBox& gt_b);

struct GroundTruth {
    std::vector<PointPair> pairs; // (source, target)
    std::optional<Homography> homography;
    std::optional<Difficulty> difficulty;
};

// Fraction of ground-truth pairs matched within correspondence error tau.
// For each ground-truth pair, the predicted pairs whose source lies within
// theta px of the ground-truth source are candidates; the nearest-source one
// (ties: nearest target, then lowest index) is scored with
// delta = 0.5*sqrt(|source err|^2 + |target err|^2). No candidate counts 0.
double correspondence_r2(const GroundTruth& gt, const CorrespondenceSet& pred, double tau,
                         double theta);

// Mean target error against the nearest-source predicted pair (no theta
// gate); an empty prediction contributes image_diag per ground-truth pair.
double mae(const GroundTruth& gt, const CorrespondenceSet& pred, double image_diag);

} // namespace specorr
