#pragma once

#include <vector>

#include "specorr/features.hpp"
#include "specorr/spectral.hpp"

namespace specorr {

// Convex combination weights for the data / regularization / saliency terms.
struct EnergyWeights {
    double lambda1 = 0.75;
    double lambda2 = 0.10;
    double lambda3 = 0.15;
};

// Throws unless all weights are non-negative and sum to 1 within 1e-12.
void validate_weights(const EnergyWeights& w);

constexpr int kUnmatched = -1;

// assignments[x] is the target index of source point x, or kUnmatched.
struct Mapping {
    std::vector<int> assignments;

    int size() const { return static_cast<int>(assignments.size()); }
    int matched_count() const;
};

enum class RegMode { mpi, hog, feature };

// Largest cross-image embedding distance, used to scale the data term into
// [0,1]. Computed once per level. 0 for a degenerate (all-equal) embedding.
double jsed_normalizer(const SpectralEmbedding& embedding);

// Per-pair contributions; the three terms below are their means over matched
// pairs, taken in source index order for bit-reproducibility.
double pair_data_cost(const SpectralEmbedding& embedding, double normalizer, int x, int y);
double pair_reg_cost(const DescriptorSet& a, const DescriptorSet& b, RegMode mode, int x, int y);
double pair_saliency_cost(const SaliencyMap& a, const SaliencyMap& b, int x, int y);

double data_term(const SpectralEmbedding& embedding, const Mapping& mapping);
double regularization_term(const DescriptorSet& a, const DescriptorSet& b,
                           const Mapping& mapping, RegMode mode);
double saliency_term(const SaliencyMap& a, const SaliencyMap& b, const Mapping& mapping);

// lambda1*data + lambda2*reg + lambda3*sal; every input must be in [0,1].
double total_energy(double data, double reg, double sal, const EnergyWeights& w);

} // namespace specorr
