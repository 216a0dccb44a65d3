#include "specorr/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "specorr/graph.hpp"

namespace specorr {

void validate_weights(const EnergyWeights& w) {
    if (w.lambda1 < 0.0 || w.lambda2 < 0.0 || w.lambda3 < 0.0)
        throw std::invalid_argument("energy weights must be non-negative");
    if (std::abs(w.lambda1 + w.lambda2 + w.lambda3 - 1.0) > 1e-12)
        throw std::invalid_argument("energy weights must sum to 1");
}

int Mapping::matched_count() const {
    int c = 0;
    for (int t : assignments)
        if (t != kUnmatched) ++c;
    return c;
}

namespace {

void check_mapping(const Mapping& mapping, int n1, int n2, const char* op) {
    if (mapping.size() != n1)
        throw std::invalid_argument(std::string(op) + ": mapping size does not match source count");
    for (int t : mapping.assignments)
        if (t != kUnmatched && (t < 0 || t >= n2))
            throw std::invalid_argument(std::string(op) + ": target index out of range");
    if (mapping.matched_count() == 0)
        throw std::invalid_argument(std::string(op) + ": mapping has no matched pairs");
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

} // namespace

double jsed_normalizer(const SpectralEmbedding& embedding) {
    double best = 0.0;
    for (int x = 0; x < embedding.n1; ++x)
        for (int y = 0; y < embedding.n2; ++y)
            best = std::max(best, jsed(embedding, x, embedding.n1 + y));
    return best;
}

double pair_data_cost(const SpectralEmbedding& embedding, double normalizer, int x, int y) {
    if (normalizer == 0.0) return 0.0; // 0/0: all cross distances vanish
    return jsed(embedding, x, embedding.n1 + y) / normalizer;
}

double pair_reg_cost(const DescriptorSet& a, const DescriptorSet& b, RegMode mode, int x, int y) {
    switch (mode) {
    case RegMode::mpi:
        if (a.d != 1 || b.d != 1)
            throw std::invalid_argument("regularization: mpi mode needs 1-dimensional descriptors");
        return std::abs(a.values[x] - b.values[y]);
    case RegMode::hog:
        if (a.d != 9 || b.d != 9)
            throw std::invalid_argument("regularization: hog mode needs 9-dimensional descriptors");
        return cosine_distance(a.row(x), b.row(y)) / 2.0;
    case RegMode::feature:
        if (a.d != b.d)
            throw std::invalid_argument("regularization: descriptor dimension mismatch");
        return cosine_distance(a.row(x), b.row(y)) / 2.0;
    }
    throw std::invalid_argument("regularization: unknown mode");
}

double pair_saliency_cost(const SaliencyMap& a, const SaliencyMap& b, int x, int y) {
    return 1.0 - 0.5 * (a.scores[x] + b.scores[y]);
}

double data_term(const SpectralEmbedding& embedding, const Mapping& mapping) {
    check_mapping(mapping, embedding.n1, embedding.n2, "data_term");
    const double normalizer = jsed_normalizer(embedding);
    double sum = 0.0;
    int count = 0;
    for (int x = 0; x < mapping.size(); ++x) {
        const int y = mapping.assignments[x];
        if (y == kUnmatched) continue;
        sum += pair_data_cost(embedding, normalizer, x, y);
        ++count;
    }
    return clamp01(sum / count);
}

double regularization_term(const DescriptorSet& a, const DescriptorSet& b,
                           const Mapping& mapping, RegMode mode) {
    check_mapping(mapping, a.n, b.n, "regularization_term");
    double sum = 0.0;
    int count = 0;
    for (int x = 0; x < mapping.size(); ++x) {
        const int y = mapping.assignments[x];
        if (y == kUnmatched) continue;
        sum += pair_reg_cost(a, b, mode, x, y);
        ++count;
    }
    return clamp01(sum / count);
}

double saliency_term(const SaliencyMap& a, const SaliencyMap& b, const Mapping& mapping) {
    check_mapping(mapping, a.n, b.n, "saliency_term");
    double sum = 0.0;
    int count = 0;
    for (int x = 0; x < mapping.size(); ++x) {
        const int y = mapping.assignments[x];
        if (y == kUnmatched) continue;
        sum += pair_saliency_cost(a, b, x, y);
        ++count;
    }
    return clamp01(sum / count);
}

double total_energy(double data, double reg, double sal, const EnergyWeights& w) {
    validate_weights(w);
    for (double t : {data, reg, sal})
        if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("total_energy: term out of range");
    return w.lambda1 * data + w.lambda2 * reg + w.lambda3 * sal;
}

} // namespace specorr
