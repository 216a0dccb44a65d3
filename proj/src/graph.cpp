#include "specorr/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace specorr {

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_distance: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
            throw std::invalid_argument("cosine_distance: non-finite input");
        dot += a[i] * b[i];
        na2 += a[i] * a[i];
        nb2 += b[i] * b[i];
    }
    if (na2 == 0.0 || nb2 == 0.0) return 1.0;
    double c = dot / (std::sqrt(na2) * std::sqrt(nb2));
    c = std::min(1.0, std::max(-1.0, c));
    return 1.0 - c;
}

namespace {

double affinity(double dist, double sigma) {
    const double t = dist / sigma;
    return std::exp(-t * t);
}

} // namespace

Mat affinity_submatrix(const DescriptorSet& descs, double sigma) {
    if (descs.n < 1) throw std::invalid_argument("affinity_submatrix: empty descriptor set");
    if (!(sigma > 0.0)) throw std::invalid_argument("affinity_submatrix: sigma must be > 0");
    Mat w(descs.n, descs.n, 1.0);
    for (int i = 0; i < descs.n; ++i) {
        for (int j = i + 1; j < descs.n; ++j) {
            const double e = affinity(cosine_distance(descs.row(i), descs.row(j)), sigma);
            w(i, j) = e;
            w(j, i) = e;
        }
    }
    return w;
}

Mat cross_affinity(const DescriptorSet& a, const DescriptorSet& b, double sigma) {
    if (a.n < 1 || b.n < 1) throw std::invalid_argument("cross_affinity: empty descriptor set");
    if (a.d != b.d)
        throw std::invalid_argument("cross_affinity: descriptor dimension mismatch (" +
                                    std::to_string(a.d) + " vs " + std::to_string(b.d) + ")");
    if (!(sigma > 0.0)) throw std::invalid_argument("cross_affinity: sigma must be > 0");
    Mat c(a.n, b.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < b.n; ++j)
            c(i, j) = affinity(cosine_distance(a.row(i), b.row(j)), sigma);
    return c;
}

JointGraph joint_graph(const Mat& w1, const Mat& w2, const Mat& c) {
    if (w1.rows != w1.cols || w2.rows != w2.cols)
        throw std::invalid_argument("joint_graph: W1 and W2 must be square");
    if (c.rows != w1.rows || c.cols != w2.rows)
        throw std::invalid_argument("joint_graph: C block has incompatible dimensions");

    const int n1 = w1.rows, n2 = w2.rows, n = n1 + n2;
    JointGraph g;
    g.n1 = n1;
    g.n2 = n2;
    g.W = Mat(n, n);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) g.W(i, j) = w1(i, j);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) g.W(n1 + i, n1 + j) = w2(i, j);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            g.W(i, n1 + j) = c(i, j);
            g.W(n1 + j, i) = c(i, j);
        }
    }

    for (int i = 0; i < n; ++i) {
        if (g.W(i, i) != 1.0)
            throw std::invalid_argument("joint_graph: diagonal entries must be exactly 1");
        for (int j = 0; j < n; ++j) {
            const double v = g.W(i, j);
            if (!(v > 0.0) || v > 1.0)
                throw std::invalid_argument("joint_graph: affinities must lie in (0,1]");
            if (std::abs(v - g.W(j, i)) > 1e-12)
                throw std::invalid_argument("joint_graph: affinity matrix is not symmetric");
        }
    }
    return g;
}

} // namespace specorr
