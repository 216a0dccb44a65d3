#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace specorr {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Dense row-major double matrix. Small fixed helper, not a linear algebra
// library; everything in this project is desk-scale dense.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int r, int c) {
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    double operator()(int r, int c) const {
        return a[static_cast<std::size_t>(r) * cols + c];
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0.0;
        for (double v : a) s = std::max(s, std::abs(v));
        return s;
    }
};

} // namespace specorr
