#pragma once

#include <string>
#include <vector>

#include "specorr/energy.hpp"
#include "specorr/features.hpp"
#include "specorr/image.hpp"
#include "specorr/spectral.hpp"

namespace specorr {

enum class DescriptorMode { mpi, hog, external };
enum class SaliencyMode { gradient, external, none };

struct MatchConfig {
    int patch_size = 16;
    int eigenvectors = 8; // embedding dimension m
    int levels = 3;
    int window_radius = 2; // Chebyshev, in target-grid patch units
    int max_passes = 20;
    double keep_percentile = 80.0;
    double sigma = 1.0;
    EnergyWeights weights{};
    DescriptorMode descriptor = DescriptorMode::hog;
    SaliencyMode saliency = SaliencyMode::gradient;
};

// Sidecar files for externally produced descriptors/saliency, finest level.
// Coarser pyramid levels look for "<path>.level<k>" and fall back to the
// built-in extractor with a warning when absent.
struct ExternalInputs {
    std::string desc_a;
    std::string desc_b;
    std::string sal_a;
    std::string sal_b;
};

struct CorrespondencePair {
    Point source;
    Point target;
    double cost = 0.0; // weighted per-pair contribution, in [0,1]
    bool selected = false;
};

struct CorrespondenceSet {
    std::vector<CorrespondencePair> pairs;
};

// Everything refine_level needs at one pyramid level.
struct LevelContext {
    const SpectralEmbedding* embedding = nullptr;
    double normalizer = 0.0; // jsed_normalizer(embedding), fixed per level
    const DescriptorSet* desc_a = nullptr;
    const DescriptorSet* desc_b = nullptr;
    const SaliencyMap* sal_a = nullptr;
    const SaliencyMap* sal_b = nullptr;
    RegMode reg_mode = RegMode::hog;
    EnergyWeights weights{};
    int target_rows = 0;
    int target_cols = 0;
};

// lambda1*data + lambda2*reg + lambda3*sal for a single (source, target) pair.
double pair_cost(const LevelContext& ctx, int x, int y);

// Mean pair cost over matched pairs; the optimizer's objective.
double level_energy(const LevelContext& ctx, const Mapping& mapping);

// Each source point gets its JSED-nearest target, ties to the lower index.
Mapping init_matching(const SpectralEmbedding& embedding);

// Iterated per-point windowed argmin in source index order. Reassigns only
// on strict improvement, so a full pass without change is a fixed point.
// energy_trace, when given, receives the energy before refinement and after
// every pass.
Mapping refine_level(const LevelContext& ctx, Mapping mapping, int window_radius,
                     int max_passes, std::vector<double>* energy_trace = nullptr);

// Nearest-rank percentile threshold on costs; pairs at or below it are
// selected. All pairs are retained with their flag.
CorrespondenceSet select_subsets(const Mapping& mapping, const std::vector<double>& costs,
                                 double keep_percentile, const InterestPointGrid& grid_a,
                                 const InterestPointGrid& grid_b);

struct LevelTrace {
    int level = 0;
    int n1 = 0;
    int n2 = 0;
    int m_used = 0;
    std::vector<double> energies; // initial + after each pass
};

struct MatchTrace {
    std::vector<LevelTrace> levels; // coarsest first
};

CorrespondenceSet match_multiresolution(const ImageRaster& raster_a, const ImageRaster& raster_b,
                                        const ExternalInputs& external, const MatchConfig& config,
                                        MatchTrace* trace = nullptr);

// Correspondence file: header "n", then "x1 y1 x2 y2 cost selected" lines.
void write_correspondences(const std::string& path, const CorrespondenceSet& set);
CorrespondenceSet read_correspondences(const std::string& path);

} // namespace specorr
