#pragma once

#include <ostream>
#include <vector>

#include "specorr/graph.hpp"
#include "specorr/matrix.hpp"

namespace specorr {

// Joint spectral embedding: column k of coords is the eigenvector of the
// normalized Laplacian belonging to the k-th smallest non-trivial eigenvalue.
struct SpectralEmbedding {
    int m = 0;
    int n1 = 0;
    int n2 = 0;
    std::vector<double> eigenvalues; // ascending, size m
    Mat coords;                      // (n1+n2) x m

    int node_count() const { return n1 + n2; }
};

// L = I - D^(-1/2) W D^(-1/2) with D the diagonal degree matrix.
Mat normalized_laplacian(const JointGraph& graph);

struct EigResult {
    std::vector<double> eigenvalues; // ascending
    Mat vectors;                     // column k pairs with eigenvalues[k]
};

// Dense symmetric eigensolver, cyclic-by-row Jacobi rotations with a fixed
// sweep order so results are bit-reproducible. Input must be symmetric
// within 1e-10; it is symmetrized as (M+M^T)/2 before solving. Columns obey
// the sign convention that the entry of largest magnitude (lowest index on
// ties) is positive.
EigResult eig_sym(const Mat& m);

// Eigenpairs with eigenvalue below 1e-10 are the trivial connected-component
// modes and are dropped; a complete joint graph has exactly one, so more
// than one triggers a disconnected-graph warning.
SpectralEmbedding spectral_embedding(const JointGraph& graph, int m);

// Euclidean distance between two joint node rows of the embedding.
double jsed(const SpectralEmbedding& embedding, int i, int j);

// Debug dump: one eigenpair per block, full precision decimal text.
void dump_spectrum(std::ostream& out, const SpectralEmbedding& embedding);

} // namespace specorr
