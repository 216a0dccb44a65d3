#include "specorr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace specorr {

namespace {

void check_box(const RegionBox& b, const char* op) {
    if (b.w <= 0 || b.h <= 0) throw std::invalid_argument(std::string(op) + ": invalid box");
}

long long intersection_area(const RegionBox& a, const RegionBox& b) {
    const long x0 = std::max(a.x, b.x);
    const long y0 = std::max(a.y, b.y);
    const long x1 = std::min(a.x + a.w, b.x + b.w);
    const long y1 = std::min(a.y + a.h, b.y + b.h);
    if (x1 <= x0 || y1 <= y0) return 0;
    return static_cast<long long>(x1 - x0) * (y1 - y0);
}

double share(long long part, long long total) {
    if (total == 0) return 0.0;
    return static_cast<double>(part) / static_cast<double>(total);
}

} // namespace

OverlapCounts region_overlap_counts(const RegionBox& pred, const RegionBox& gt) {
    check_box(pred, "region_overlap_counts");
    check_box(gt, "region_overlap_counts");
    const long long inter = intersection_area(pred, gt);
    return {inter, gt.area() - inter, pred.area() - inter};
}

double relevance_r1(const RegionBox& pred, const RegionBox& gt) {
    const OverlapCounts c = region_overlap_counts(pred, gt);
    return share(c.tp, c.total());
}

double relevance_r1(const RegionBox& pred_a, const RegionBox& pred_b, const RegionBox& gt_a,
                    const RegionBox& gt_b) {
    const OverlapCounts c = region_overlap_counts(pred_a, gt_a) + region_overlap_counts(pred_b, gt_b);
    return share(c.tp, c.total());
}

double mean_relevance(std::span<const double> scores) {
    if (scores.empty()) throw std::invalid_argument("mean_relevance: empty score list");
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

double fpr_rate(const RegionBox& pred, const RegionBox& gt) {
    const OverlapCounts c = region_overlap_counts(pred, gt);
    return share(c.fp, c.total());
}

double fpr_rate(const RegionBox& pred_a, const RegionBox& pred_b, const RegionBox& gt_a,
                const RegionBox& gt_b) {
    const OverlapCounts c = region_overlap_counts(pred_a, gt_a) + region_overlap_counts(pred_b, gt_b);
    return share(c.fp, c.total());
}

namespace {

struct Chosen {
    int index = -1;
    double source_d2 = 0.0;
    double target_d2 = 0.0;
};

// theta < 0 disables the source gate (used by mae).
Chosen choose_prediction(const Point& gt_source, const Point& gt_target,
                         const CorrespondenceSet& pred, double theta) {
    Chosen best;
    for (int i = 0; i < static_cast<int>(pred.pairs.size()); ++i) {
        const CorrespondencePair& p = pred.pairs[i];
        const double dsx = p.source.x - gt_source.x;
        const double dsy = p.source.y - gt_source.y;
        const double ds2 = dsx * dsx + dsy * dsy;
        if (theta >= 0.0 && ds2 > theta * theta) continue;
        const double dtx = p.target.x - gt_target.x;
        const double dty = p.target.y - gt_target.y;
        const double dt2 = dtx * dtx + dty * dty;
        if (best.index < 0 || ds2 < best.source_d2 ||
            (ds2 == best.source_d2 && dt2 < best.target_d2)) {
            best = {i, ds2, dt2};
        }
    }
    return best;
}

} // namespace

double correspondence_r2(const GroundTruth& gt, const CorrespondenceSet& pred, double tau,
                         double theta) {
    if (gt.pairs.empty()) throw std::invalid_argument("correspondence_r2: empty ground truth");
    if (tau < 0.0 || theta < 0.0)
        throw std::invalid_argument("correspondence_r2: tau and theta must be >= 0");
    int hits = 0;
    for (const auto& [p_i, p_j] : gt.pairs) {
        const Chosen c = choose_prediction(p_i, p_j, pred, theta);
        if (c.index < 0) continue;
        const double delta = 0.5 * std::sqrt(c.source_d2 + c.target_d2);
        if (delta <= tau) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(gt.pairs.size());
}

double mae(const GroundTruth& gt, const CorrespondenceSet& pred, double image_diag) {
    if (gt.pairs.empty()) throw std::invalid_argument("mae: empty ground truth");
    double sum = 0.0;
    for (const auto& [p_i, p_j] : gt.pairs) {
        const Chosen c = choose_prediction(p_i, p_j, pred, -1.0);
        sum += c.index < 0 ? image_diag : std::sqrt(c.target_d2);
    }
    return sum / static_cast<double>(gt.pairs.size());
}

} // namespace specorr
