#include "specorr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "specorr/log.hpp"

namespace specorr {

Mat normalized_laplacian(const JointGraph& graph) {
    const int n = graph.W.rows;
    if (n < 1 || graph.W.cols != n) throw std::invalid_argument("normalized_laplacian: invalid graph");
    std::vector<double> inv_sqrt_deg(n);
    for (int i = 0; i < n; ++i) {
        double deg = 0.0;
        for (int j = 0; j < n; ++j) deg += graph.W(i, j);
        if (!(deg > 0.0)) throw std::invalid_argument("normalized_laplacian: zero degree node");
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }
    Mat l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double s = graph.W(i, j) * inv_sqrt_deg[i] * inv_sqrt_deg[j];
            l(i, j) = (i == j) ? 1.0 - s : -s;
        }
    }
    return l;
}

namespace {

double off_diagonal_norm(const Mat& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = i + 1; j < a.cols; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
}

void apply_sign_convention(Mat& v) {
    for (int c = 0; c < v.cols; ++c) {
        int k = 0;
        double best = std::abs(v(0, c));
        for (int r = 1; r < v.rows; ++r) {
            const double m = std::abs(v(r, c));
            if (m > best) {
                best = m;
                k = r;
            }
        }
        if (v(k, c) < 0.0)
            for (int r = 0; r < v.rows; ++r) v(r, c) = -v(r, c);
    }
}

} // namespace

EigResult eig_sym(const Mat& m) {
    const int n = m.rows;
    if (n < 1 || m.cols != n) throw std::invalid_argument("eig_sym: matrix must be square");

    const double scale = m.max_abs();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-10 * (1.0 + scale))
                throw std::invalid_argument("eig_sym: matrix is not symmetric within 1e-10");

    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));

    Mat v = Mat::identity(n);
    const double frob = a.frobenius_norm();
    const double tol = 1e-13 * std::max(1.0, frob);
    constexpr int kMaxSweeps = 50;

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 1.0 / (2.0 * theta); // avoid theta^2 overflow
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) /
                        (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(p, k) = a(k, p);
                    a(k, q) = s * akp + c * akq;
                    a(q, k) = a(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps && off_diagonal_norm(a) > 1e-9 * (1.0 + frob))
        throw std::runtime_error("eig_sym: failed to converge within 50 sweeps");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a(x, x) < a(y, y); });

    EigResult res;
    res.eigenvalues.resize(n);
    res.vectors = Mat(n, n);
    for (int k = 0; k < n; ++k) {
        res.eigenvalues[k] = a(order[k], order[k]);
        for (int r = 0; r < n; ++r) res.vectors(r, k) = v(r, order[k]);
    }
    apply_sign_convention(res.vectors);
    return res;
}

SpectralEmbedding spectral_embedding(const JointGraph& graph, int m) {
    const int n = graph.n1 + graph.n2;
    if (m < 1 || m > n - 1)
        throw std::invalid_argument("spectral_embedding: m must be in [1, " + std::to_string(n - 1) + "]");

    const EigResult eig = eig_sym(normalized_laplacian(graph));

    constexpr double kTrivial = 1e-10;
    int trivial = 0;
    while (trivial < n && eig.eigenvalues[trivial] < kTrivial) ++trivial;
    if (trivial == 0)
        throw std::runtime_error("spectral_embedding: no trivial eigenvalue found (not a Laplacian?)");
    if (trivial > 1)
        warn("spectral_embedding: " + std::to_string(trivial) +
             " near-zero eigenvalues; the joint graph looks disconnected");
    if (m > n - trivial)
        throw std::invalid_argument("spectral_embedding: m too large, only " +
                                    std::to_string(n - trivial) + " non-trivial eigenpairs available");

    SpectralEmbedding emb;
    emb.m = m;
    emb.n1 = graph.n1;
    emb.n2 = graph.n2;
    emb.eigenvalues.assign(eig.eigenvalues.begin() + trivial, eig.eigenvalues.begin() + trivial + m);
    emb.coords = Mat(n, m);
    for (int k = 0; k < m; ++k)
        for (int r = 0; r < n; ++r) emb.coords(r, k) = eig.vectors(r, trivial + k);
    return emb;
}

double jsed(const SpectralEmbedding& embedding, int i, int j) {
    const int n = embedding.node_count();
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::invalid_argument("jsed: node index out of range");
    double s = 0.0;
    for (int k = 0; k < embedding.m; ++k) {
        const double d = embedding.coords(i, k) - embedding.coords(j, k);
        s += d * d;
    }
    return std::sqrt(s);
}

void dump_spectrum(std::ostream& out, const SpectralEmbedding& embedding) {
    char buf[64];
    out << embedding.m << " " << embedding.n1 << " " << embedding.n2 << "\n";
    for (int k = 0; k < embedding.m; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", embedding.eigenvalues[k]);
        out << "eigenpair " << k << " " << buf << "\n";
        for (int r = 0; r < embedding.node_count(); ++r) {
            std::snprintf(buf, sizeof buf, "%.17g", embedding.coords(r, k));
            out << buf << "\n";
        }
        out << "\n";
    }
}

} // namespace specorr
