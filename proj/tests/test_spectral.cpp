#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "specorr/spectral.hpp"

using namespace specorr;

namespace {

std::uint64_t lcg_next(std::uint64_t& s) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
}

double uniform(std::uint64_t& s, double lo, double hi) {
    return lo + (hi - lo) * (lcg_next(s) % 1000000) / 1000000.0;
}

Mat random_symmetric(int n, std::uint64_t& state) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = uniform(state, -1.0, 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

JointGraph two_node_graph(double c) {
    Mat w1(1, 1, 1.0), w2(1, 1, 1.0), cross(1, 1, c);
    return joint_graph(w1, w2, cross);
}

SpectralEmbedding embedding_from_coords(int n1, int n2, int m, const std::vector<double>& coords) {
    SpectralEmbedding emb;
    emb.n1 = n1;
    emb.n2 = n2;
    emb.m = m;
    emb.eigenvalues.assign(m, 0.5);
    emb.coords = Mat(n1 + n2, m);
    emb.coords.a = coords;
    return emb;
}

} // namespace

TEST_CASE("normalized_laplacian hand cases") {
    SUBCASE("all-ones 2x2") {
        JointGraph g = two_node_graph(1.0);
        const Mat l = normalized_laplacian(g);
        CHECK(l(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(l(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(l(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(l(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("identity graph has zero Laplacian") {
        JointGraph g;
        g.n1 = 2;
        g.n2 = 1;
        g.W = Mat::identity(3);
        const Mat l = normalized_laplacian(g);
        for (double v : l.a) CHECK(v == 0.0);
    }
    SUBCASE("L annihilates D^(1/2) 1") {
        std::uint64_t state = 5;
        JointGraph g;
        g.n1 = 3;
        g.n2 = 2;
        g.W = Mat(5, 5, 1.0);
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) {
                const double v = uniform(state, 0.1, 1.0);
                g.W(i, j) = v;
                g.W(j, i) = v;
            }
        const Mat l = normalized_laplacian(g);
        std::vector<double> sqrt_deg(5);
        for (int i = 0; i < 5; ++i) {
            double d = 0.0;
            for (int j = 0; j < 5; ++j) d += g.W(i, j);
            sqrt_deg[i] = std::sqrt(d);
        }
        for (int i = 0; i < 5; ++i) {
            double dot = 0.0;
            for (int j = 0; j < 5; ++j) dot += l(i, j) * sqrt_deg[j];
            CHECK(std::abs(dot) <= 1e-12);
        }
    }
}

TEST_CASE("eig_sym recovers the K3 Laplacian spectrum") {
    Mat m(3, 3);
    m(0, 0) = 2; m(0, 1) = -1; m(0, 2) = -1;
    m(1, 0) = -1; m(1, 1) = 2; m(1, 2) = -1;
    m(2, 0) = -1; m(2, 1) = -1; m(2, 2) = 2;
    const EigResult eig = eig_sym(m);
    CHECK(std::abs(eig.eigenvalues[0]) <= 1e-9);
    CHECK(std::abs(eig.eigenvalues[1] - 3.0) <= 1e-9);
    CHECK(std::abs(eig.eigenvalues[2] - 3.0) <= 1e-9);
}

TEST_CASE("eig_sym diagonal matrix yields sorted axis eigenvectors") {
    Mat m(3, 3);
    m(0, 0) = 3.0;
    m(1, 1) = 1.0;
    m(2, 2) = 2.0;
    const EigResult eig = eig_sym(m);
    CHECK(eig.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(eig.vectors(1, 0) == 1.0);
    CHECK(eig.vectors(2, 1) == 1.0);
    CHECK(eig.vectors(0, 2) == 1.0);
}

TEST_CASE("eig_sym reconstruction oracle on random matrices") {
    std::uint64_t state = 17;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(lcg_next(state) % 7);
        const Mat m = random_symmetric(n, state);
        const EigResult eig = eig_sym(m);

        // orthonormal columns
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double dot = 0.0;
                for (int r = 0; r < n; ++r) dot += eig.vectors(r, i) * eig.vectors(r, j);
                CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-8);
            }

        // V diag(w) V^T == M
        const double frob = m.frobenius_norm();
        double err = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double v = 0.0;
                for (int k = 0; k < n; ++k)
                    v += eig.vectors(r, k) * eig.eigenvalues[k] * eig.vectors(c, k);
                err += (v - m(r, c)) * (v - m(r, c));
            }
        CHECK(std::sqrt(err) <= 1e-7 * std::max(frob, 1e-30));
    }
}

TEST_CASE("eig_sym rejects asymmetric input") {
    Mat m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 0.5;
    CHECK_THROWS_AS(eig_sym(m), std::invalid_argument);
}

TEST_CASE("spectral_embedding matches the analytic 2-node case") {
    const double c = 0.5;
    const SpectralEmbedding emb = spectral_embedding(two_node_graph(c), 1);
    REQUIRE(emb.m == 1);
    CHECK(std::abs(emb.eigenvalues[0] - 2.0 * c / (1.0 + c)) <= 1e-12);
    CHECK(std::abs(emb.coords(0, 0) - 1.0 / std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(emb.coords(1, 0) + 1.0 / std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(jsed(emb, 0, 1) - std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("identical images give block-symmetric eigenvectors") {
    std::uint64_t state = 23;
    DescriptorSet set;
    set.n = 6;
    set.d = 4;
    set.kind = DescriptorKind::external;
    set.values.resize(24);
    for (double& v : set.values) v = uniform(state, 0.0, 1.0);
    const Mat w = affinity_submatrix(set, 1.0);
    const Mat c = cross_affinity(set, set, 1.0);
    const SpectralEmbedding emb = spectral_embedding(joint_graph(w, w, c), 2);
    for (int k = 0; k < emb.m; ++k)
        for (int i = 0; i < 6; ++i)
            CHECK(std::abs(emb.coords(i, k) - emb.coords(6 + i, k)) <= 1e-8);
}

TEST_CASE("spectral_embedding boundary and error cases") {
    const JointGraph g = two_node_graph(0.3);
    const SpectralEmbedding full = spectral_embedding(g, 1); // m = n1+n2-1
    CHECK(full.m == 1);
    CHECK_THROWS_AS(spectral_embedding(g, 2), std::invalid_argument);
    CHECK_THROWS_AS(spectral_embedding(g, 0), std::invalid_argument);
}

TEST_CASE("normalized Laplacian eigenvalues stay within [0,2]") {
    std::uint64_t state = 31;
    for (int trial = 0; trial < 10; ++trial) {
        const int n1 = 2 + static_cast<int>(lcg_next(state) % 4);
        const int n2 = 2 + static_cast<int>(lcg_next(state) % 4);
        DescriptorSet a, b;
        a.n = n1; a.d = 3; a.kind = DescriptorKind::external;
        b.n = n2; b.d = 3; b.kind = DescriptorKind::external;
        a.values.resize(n1 * 3);
        b.values.resize(n2 * 3);
        for (double& v : a.values) v = uniform(state, -1.0, 1.0);
        for (double& v : b.values) v = uniform(state, -1.0, 1.0);
        const JointGraph g = joint_graph(affinity_submatrix(a, 1.0), affinity_submatrix(b, 1.0),
                                         cross_affinity(a, b, 1.0));
        const SpectralEmbedding emb = spectral_embedding(g, n1 + n2 - 1);
        for (double ev : emb.eigenvalues) {
            CHECK(ev >= 0.0);
            CHECK(ev <= 2.0 + 1e-9);
        }
    }
}

TEST_CASE("jsed basics and invariances") {
    std::uint64_t state = 47;
    std::vector<double> coords(8 * 3);
    for (double& v : coords) v = uniform(state, -1.0, 1.0);
    const SpectralEmbedding emb = embedding_from_coords(4, 4, 3, coords);

    CHECK(jsed(emb, 2, 2) == 0.0);
    CHECK_THROWS_AS(jsed(emb, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(jsed(emb, -1, 0), std::invalid_argument);

    SUBCASE("symmetry") {
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) CHECK(jsed(emb, i, j) == jsed(emb, j, i));
    }
    SUBCASE("sign-flip invariance") {
        std::vector<double> flipped = coords;
        for (int r = 0; r < 8; ++r) flipped[r * 3 + 1] = -flipped[r * 3 + 1];
        const SpectralEmbedding emb2 = embedding_from_coords(4, 4, 3, flipped);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                CHECK(std::abs(jsed(emb, i, j) - jsed(emb2, i, j)) <= 1e-12);
    }
    SUBCASE("triangle inequality") {
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                for (int k = 0; k < 8; ++k)
                    CHECK(jsed(emb, i, j) <= jsed(emb, i, k) + jsed(emb, k, j) + 1e-12);
    }
}

TEST_CASE("swapping the two images permutes the JSED matrix") {
    std::uint64_t state = 61;
    DescriptorSet a, b;
    a.n = 3; a.d = 2; a.kind = DescriptorKind::external;
    b.n = 4; b.d = 2; b.kind = DescriptorKind::external;
    a.values.resize(6);
    b.values.resize(8);
    for (double& v : a.values) v = uniform(state, -1.0, 1.0);
    for (double& v : b.values) v = uniform(state, -1.0, 1.0);

    const JointGraph g_ab = joint_graph(affinity_submatrix(a, 1.0), affinity_submatrix(b, 1.0),
                                        cross_affinity(a, b, 1.0));
    const JointGraph g_ba = joint_graph(affinity_submatrix(b, 1.0), affinity_submatrix(a, 1.0),
                                        cross_affinity(b, a, 1.0));
    const int m = 3;
    const SpectralEmbedding e_ab = spectral_embedding(g_ab, m);
    const SpectralEmbedding e_ba = spectral_embedding(g_ba, m);

    auto swapped = [&](int i) { return i < 3 ? 4 + i : i - 3; };
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            CHECK(std::abs(jsed(e_ab, i, j) - jsed(e_ba, swapped(i), swapped(j))) <= 1e-7);
}

TEST_CASE("dump_spectrum emits one block per eigenpair") {
    const SpectralEmbedding emb = spectral_embedding(two_node_graph(0.4), 1);
    std::ostringstream out;
    dump_spectrum(out, emb);
    const std::string text = out.str();
    CHECK(text.find("1 1 1") == 0);
    CHECK(text.find("eigenpair 0 ") != std::string::npos);
}
