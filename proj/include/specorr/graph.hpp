#pragma once

#include <span>

#include "specorr/features.hpp"
#include "specorr/matrix.hpp"

namespace specorr {

// Complete weighted graph over both images' interest points. Block layout:
// nodes [0, n1) are image 1, nodes [n1, n1+n2) are image 2, and
// W = [W1 C; C^T W2] with all entries in (0,1] and unit diagonal.
struct JointGraph {
    int n1 = 0;
    int n2 = 0;
    Mat W;
};

// 1 - a.b/(|a||b|), in [0,2]. A zero vector is at distance 1 from everything.
double cosine_distance(std::span<const double> a, std::span<const double> b);

// (W)_{x,y} = exp(-(cosine_distance(f(x),f(y))/sigma)^2), diagonal = 1.
Mat affinity_submatrix(const DescriptorSet& descs, double sigma);

// C_{x,y} over two descriptor sets of equal dimension; n1 x n2.
Mat cross_affinity(const DescriptorSet& a, const DescriptorSet& b, double sigma);

JointGraph joint_graph(const Mat& w1, const Mat& w2, const Mat& c);

} // namespace specorr
