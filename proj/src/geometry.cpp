#include "specorr/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "specorr/spectral.hpp"
#include "specorr/textio.hpp"

namespace specorr {

namespace {

struct NormTransform {
    double scale = 1.0;
    double cx = 0.0;
    double cy = 0.0;

    Point apply(const Point& p) const { return {scale * (p.x - cx), scale * (p.y - cy)}; }
};

// Centroid to origin, mean distance sqrt(2).
NormTransform normalizer_for(std::span<const PointPair> pairs, bool source) {
    NormTransform t;
    const double n = static_cast<double>(pairs.size());
    for (const auto& pr : pairs) {
        const Point& p = source ? pr.first : pr.second;
        t.cx += p.x;
        t.cy += p.y;
    }
    t.cx /= n;
    t.cy /= n;
    double mean_dist = 0.0;
    for (const auto& pr : pairs) {
        const Point& p = source ? pr.first : pr.second;
        mean_dist += std::hypot(p.x - t.cx, p.y - t.cy);
    }
    mean_dist /= n;
    t.scale = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
    return t;
}

Mat mat3_mul(const Mat& a, const Mat& b) {
    Mat c(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

double det3(const Mat& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Mat normalize_scale(Mat h) {
    if (std::abs(h(2, 2)) > 1e-12) {
        const double inv = 1.0 / h(2, 2);
        for (double& v : h.a) v *= inv;
    } else {
        double frob = 0.0;
        for (double v : h.a) frob += v * v;
        const double inv = 1.0 / std::sqrt(frob);
        for (double& v : h.a) v *= inv;
        // fix the overall sign so the result is deterministic
        double best = 0.0;
        double lead = 0.0;
        for (double v : h.a)
            if (std::abs(v) > best) {
                best = std::abs(v);
                lead = v;
            }
        if (lead < 0.0)
            for (double& v : h.a) v = -v;
    }
    return h;
}

} // namespace

Homography estimate_homography(std::span<const PointPair> pairs) {
    if (pairs.size() < 4)
        throw std::invalid_argument("estimate_homography: need at least 4 point pairs");
    for (const auto& pr : pairs)
        if (!std::isfinite(pr.first.x) || !std::isfinite(pr.first.y) ||
            !std::isfinite(pr.second.x) || !std::isfinite(pr.second.y))
            throw std::invalid_argument("estimate_homography: non-finite point");

    const NormTransform ts = normalizer_for(pairs, true);
    const NormTransform tt = normalizer_for(pairs, false);

    // Rows of the 2n x 9 DLT system; accumulate A^T A (9x9) directly.
    Mat ata(9, 9);
    for (const auto& pr : pairs) {
        const Point s = ts.apply(pr.first);
        const Point t = tt.apply(pr.second);
        const double r1[9] = {-s.x, -s.y, -1.0, 0.0, 0.0, 0.0, t.x * s.x, t.x * s.y, t.x};
        const double r2[9] = {0.0, 0.0, 0.0, -s.x, -s.y, -1.0, t.y * s.x, t.y * s.y, t.y};
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j) ata(i, j) += r1[i] * r1[j] + r2[i] * r2[j];
    }

    const EigResult eig = eig_sym(ata);
    // One near-null direction is the solution; a second one means the point
    // configuration does not determine a homography.
    const double scale = std::max(1.0, eig.eigenvalues[8]);
    if (eig.eigenvalues[1] <= 1e-10 * scale)
        throw std::invalid_argument("estimate_homography: degenerate configuration");

    Mat hn(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) hn(i, j) = eig.vectors(3 * i + j, 0);

    // Denormalize: H = T_t^{-1} * Hn * T_s.
    Mat t_s(3, 3);
    t_s(0, 0) = ts.scale; t_s(0, 2) = -ts.scale * ts.cx;
    t_s(1, 1) = ts.scale; t_s(1, 2) = -ts.scale * ts.cy;
    t_s(2, 2) = 1.0;
    Mat t_t_inv(3, 3);
    t_t_inv(0, 0) = 1.0 / tt.scale; t_t_inv(0, 2) = tt.cx;
    t_t_inv(1, 1) = 1.0 / tt.scale; t_t_inv(1, 2) = tt.cy;
    t_t_inv(2, 2) = 1.0;

    Mat h = normalize_scale(mat3_mul(t_t_inv, mat3_mul(hn, t_s)));
    if (std::abs(det3(h)) <= 1e-12)
        throw std::invalid_argument("estimate_homography: degenerate configuration (singular result)");
    return Homography(std::move(h));
}

std::vector<ProjectedPoint> interpolate_keypoints(const Homography& h, std::span<const Point> points) {
    std::vector<ProjectedPoint> out;
    out.reserve(points.size());
    for (const Point& p : points) {
        const double X = h.h(0, 0) * p.x + h.h(0, 1) * p.y + h.h(0, 2);
        const double Y = h.h(1, 0) * p.x + h.h(1, 1) * p.y + h.h(1, 2);
        const double w = h.h(2, 0) * p.x + h.h(2, 1) * p.y + h.h(2, 2);
        ProjectedPoint q;
        if (std::abs(w) <= 1e-12) {
            q.at_infinity = true;
        } else {
            q.x = X / w;
            q.y = Y / w;
        }
        out.push_back(q);
    }
    return out;
}

Homography homography_inverse(const Homography& h) {
    const Mat& m = h.h;
    const double det = det3(m);
    if (std::abs(det) <= 1e-12)
        throw std::invalid_argument("homography_inverse: matrix is singular");
    Mat inv(3, 3);
    inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
    inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
    inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
    inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / det;
    inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
    inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
    inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
    inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
    inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
    return Homography(normalize_scale(std::move(inv)));
}

Difficulty classify_pair(const Homography& h, std::span<const PointPair> gt_pairs, double rho) {
    if (gt_pairs.empty()) throw std::invalid_argument("classify_pair: empty ground truth");
    std::vector<Point> sources;
    sources.reserve(gt_pairs.size());
    for (const auto& pr : gt_pairs) sources.push_back(pr.first);
    const auto projected = interpolate_keypoints(h, sources);
    double max_err = 0.0;
    for (std::size_t i = 0; i < projected.size(); ++i) {
        if (projected[i].at_infinity) return Difficulty::difficult;
        const double err = std::hypot(projected[i].x - gt_pairs[i].second.x,
                                      projected[i].y - gt_pairs[i].second.y);
        max_err = std::max(max_err, err);
    }
    return max_err <= rho ? Difficulty::easy : Difficulty::difficult;
}

void write_homography(const std::string& path, const Homography& h) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    char buf[96];
    for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", h.h(i, 0), h.h(i, 1), h.h(i, 2));
        out << buf;
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

Homography read_homography(const std::string& path) {
    const auto lines = textio::read_data_lines(path);
    if (lines.size() != 3) throw std::runtime_error(path + ": expected 3 rows of 3 numbers");
    Mat m(3, 3);
    for (int i = 0; i < 3; ++i) {
        const std::string ctx = path + ":" + std::to_string(lines[i].number);
        const auto toks = textio::split_ws(lines[i].text);
        if (toks.size() != 3) throw std::runtime_error(ctx + ": expected 3 numbers");
        for (int j = 0; j < 3; ++j) m(i, j) = textio::parse_double(toks[j], ctx);
    }
    if (std::abs(det3(m)) <= 1e-12) throw std::runtime_error(path + ": homography is singular");
    return Homography(std::move(m));
}

} // namespace specorr
