#include "specorr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "specorr/log.hpp"
#include "specorr/textio.hpp"

namespace specorr {

double pair_cost(const LevelContext& ctx, int x, int y) {
    return ctx.weights.lambda1 * pair_data_cost(*ctx.embedding, ctx.normalizer, x, y) +
           ctx.weights.lambda2 * pair_reg_cost(*ctx.desc_a, *ctx.desc_b, ctx.reg_mode, x, y) +
           ctx.weights.lambda3 * pair_saliency_cost(*ctx.sal_a, *ctx.sal_b, x, y);
}

double level_energy(const LevelContext& ctx, const Mapping& mapping) {
    double sum = 0.0;
    int count = 0;
    for (int x = 0; x < mapping.size(); ++x) {
        const int y = mapping.assignments[x];
        if (y == kUnmatched) continue;
        sum += pair_cost(ctx, x, y);
        ++count;
    }
    if (count == 0) throw std::invalid_argument("level_energy: mapping has no matched pairs");
    return sum / count;
}

Mapping init_matching(const SpectralEmbedding& embedding) {
    Mapping mapping;
    mapping.assignments.resize(embedding.n1, kUnmatched);
    for (int x = 0; x < embedding.n1; ++x) {
        int best = 0;
        double best_d = jsed(embedding, x, embedding.n1);
        for (int y = 1; y < embedding.n2; ++y) {
            const double d = jsed(embedding, x, embedding.n1 + y);
            if (d < best_d) {
                best_d = d;
                best = y;
            }
        }
        mapping.assignments[x] = best;
    }
    return mapping;
}

Mapping refine_level(const LevelContext& ctx, Mapping mapping, int window_radius,
                     int max_passes, std::vector<double>* energy_trace) {
    if (window_radius < 0) throw std::invalid_argument("refine_level: window_radius must be >= 0");
    if (ctx.target_rows * ctx.target_cols != ctx.embedding->n2)
        throw std::invalid_argument("refine_level: target grid does not match embedding");

    if (energy_trace) energy_trace->push_back(level_energy(ctx, mapping));
    for (int pass = 0; pass < max_passes; ++pass) {
        bool changed = false;
        for (int x = 0; x < mapping.size(); ++x) {
            const int y0 = mapping.assignments[x];
            if (y0 == kUnmatched) continue;
            const int r0 = y0 / ctx.target_cols;
            const int c0 = y0 % ctx.target_cols;
            int best = y0;
            double best_cost = pair_cost(ctx, x, y0);
            const int r_lo = std::max(0, r0 - window_radius);
            const int r_hi = std::min(ctx.target_rows - 1, r0 + window_radius);
            const int c_lo = std::max(0, c0 - window_radius);
            const int c_hi = std::min(ctx.target_cols - 1, c0 + window_radius);
            for (int r = r_lo; r <= r_hi; ++r) {
                for (int c = c_lo; c <= c_hi; ++c) {
                    const int y = r * ctx.target_cols + c;
                    if (y == y0) continue;
                    const double cost = pair_cost(ctx, x, y);
                    if (cost < best_cost) {
                        best_cost = cost;
                        best = y;
                    }
                }
            }
            if (best != y0) {
                mapping.assignments[x] = best;
                changed = true;
            }
        }
        if (energy_trace) energy_trace->push_back(level_energy(ctx, mapping));
        if (!changed) break;
    }
    return mapping;
}

CorrespondenceSet select_subsets(const Mapping& mapping, const std::vector<double>& costs,
                                 double keep_percentile, const InterestPointGrid& grid_a,
                                 const InterestPointGrid& grid_b) {
    if (!(keep_percentile > 0.0 && keep_percentile <= 100.0))
        throw std::invalid_argument("select_subsets: keep_percentile must be in (0,100]");
    if (costs.empty()) throw std::invalid_argument("select_subsets: empty cost list");
    if (static_cast<int>(costs.size()) != mapping.matched_count())
        throw std::invalid_argument("select_subsets: costs not aligned with matched pairs");

    std::vector<double> sorted = costs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(keep_percentile * n / 100.0));
    rank = std::max<std::size_t>(1, std::min(rank, n));
    const double threshold = sorted[rank - 1];

    CorrespondenceSet set;
    set.pairs.reserve(n);
    std::size_t k = 0;
    for (int x = 0; x < mapping.size(); ++x) {
        const int y = mapping.assignments[x];
        if (y == kUnmatched) continue;
        CorrespondencePair pair;
        pair.source = grid_a.centers[x];
        pair.target = grid_b.centers[y];
        pair.cost = costs[k];
        pair.selected = costs[k] <= threshold;
        set.pairs.push_back(pair);
        ++k;
    }
    return set;
}

namespace {

// Per-level sidecar convention: finest level uses the given path, level k>=1
// uses "<path>.level<k>".
std::string level_path(const std::string& base, int level) {
    return level == 0 ? base : base + ".level" + std::to_string(level);
}

DescriptorSet level_descriptors(const ImageRaster& raster, const InterestPointGrid& grid,
                                DescriptorMode mode, const std::string& base_path, int level) {
    switch (mode) {
    case DescriptorMode::mpi:
        return mpi_descriptor(raster, grid);
    case DescriptorMode::hog:
        return hog_descriptor(raster, grid);
    case DescriptorMode::external: {
        if (base_path.empty())
            throw std::invalid_argument("external descriptor mode requires a descriptor file");
        const std::string path = level_path(base_path, level);
        if (!std::filesystem::exists(path)) {
            if (level == 0) throw std::runtime_error(path + ": descriptor file not found");
            warn(path + " missing; falling back to hog descriptors at level " + std::to_string(level));
            return hog_descriptor(raster, grid);
        }
        return load_descriptors(path, grid);
    }
    }
    throw std::invalid_argument("unknown descriptor mode");
}

SaliencyMap level_saliency(const ImageRaster& raster, const InterestPointGrid& grid,
                           SaliencyMode mode, const std::string& base_path, int level) {
    switch (mode) {
    case SaliencyMode::gradient:
        return gradient_saliency(raster, grid);
    case SaliencyMode::none: {
        SaliencyMap map;
        map.n = grid.count();
        map.scores.assign(map.n, 1.0); // term contributes no penalty
        return map;
    }
    case SaliencyMode::external: {
        if (base_path.empty())
            throw std::invalid_argument("external saliency mode requires a saliency file");
        const std::string path = level_path(base_path, level);
        if (!std::filesystem::exists(path)) {
            if (level == 0) throw std::runtime_error(path + ": saliency file not found");
            warn(path + " missing; falling back to gradient saliency at level " + std::to_string(level));
            return gradient_saliency(raster, grid);
        }
        return load_saliency(path, grid);
    }
    }
    throw std::invalid_argument("unknown saliency mode");
}

RegMode reg_mode_for(DescriptorMode mode) {
    switch (mode) {
    case DescriptorMode::mpi: return RegMode::mpi;
    case DescriptorMode::hog: return RegMode::hog;
    case DescriptorMode::external: return RegMode::feature;
    }
    throw std::invalid_argument("unknown descriptor mode");
}

// Nearest patch index for a pixel coordinate; exact halfway cases take the
// lower index.
int nearest_patch_index(double v, int patch_size, int count) {
    const int i = static_cast<int>(std::ceil(v / patch_size - 1.0));
    return std::max(0, std::min(count - 1, i));
}

// Doubles each coarse target center into fine-level pixels and snaps to the
// nearest valid fine patch.
Mapping project_mapping(const Mapping& coarse, const InterestPointGrid& coarse_a,
                        const InterestPointGrid& coarse_b, const InterestPointGrid& fine_a,
                        const InterestPointGrid& fine_b) {
    Mapping fine;
    fine.assignments.resize(fine_a.count(), kUnmatched);
    for (int r = 0; r < fine_a.rows; ++r) {
        for (int c = 0; c < fine_a.cols; ++c) {
            const int pr = std::min(r / 2, coarse_a.rows - 1);
            const int pc = std::min(c / 2, coarse_a.cols - 1);
            const int coarse_target = coarse.assignments[pr * coarse_a.cols + pc];
            if (coarse_target == kUnmatched) continue;
            const Point ct = coarse_b.centers[coarse_target];
            const int tr = nearest_patch_index(2.0 * ct.y, fine_b.patch_size, fine_b.rows);
            const int tc = nearest_patch_index(2.0 * ct.x, fine_b.patch_size, fine_b.cols);
            fine.assignments[r * fine_a.cols + c] = tr * fine_b.cols + tc;
        }
    }
    return fine;
}

int feasible_levels(const ImageRaster& a, const ImageRaster& b, int patch_size) {
    int levels = 1;
    int wa = a.width, ha = a.height, wb = b.width, hb = b.height;
    while (true) {
        const int wa2 = (wa + 1) / 2, ha2 = (ha + 1) / 2;
        const int wb2 = (wb + 1) / 2, hb2 = (hb + 1) / 2;
        if (wa2 < patch_size || ha2 < patch_size || wb2 < patch_size || hb2 < patch_size) break;
        wa = wa2; ha = ha2; wb = wb2; hb = hb2;
        ++levels;
    }
    return levels;
}

void validate_config(const MatchConfig& cfg) {
    if (cfg.patch_size < 4) throw std::invalid_argument("patch_size must be >= 4");
    if (cfg.eigenvectors < 1) throw std::invalid_argument("eigenvectors must be >= 1");
    if (cfg.levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (cfg.window_radius < 0) throw std::invalid_argument("window radius must be >= 0");
    if (cfg.max_passes < 0) throw std::invalid_argument("max_passes must be >= 0");
    if (!(cfg.keep_percentile > 0.0 && cfg.keep_percentile <= 100.0))
        throw std::invalid_argument("keep_percentile must be in (0,100]");
    if (!(cfg.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    validate_weights(cfg.weights);
}

} // namespace

CorrespondenceSet match_multiresolution(const ImageRaster& raster_a, const ImageRaster& raster_b,
                                        const ExternalInputs& external, const MatchConfig& config,
                                        MatchTrace* trace) {
    validate_config(config);
    if (raster_a.width < config.patch_size || raster_a.height < config.patch_size ||
        raster_b.width < config.patch_size || raster_b.height < config.patch_size)
        throw std::invalid_argument("match: image smaller than one patch");

    int levels = std::min(config.levels, feasible_levels(raster_a, raster_b, config.patch_size));
    if (levels < config.levels)
        warn("match: clamping levels from " + std::to_string(config.levels) + " to " +
             std::to_string(levels) + " so every level admits at least one patch");

    const Pyramid pyr_a = build_pyramid(raster_a, levels, config.patch_size);
    const Pyramid pyr_b = build_pyramid(raster_b, levels, config.patch_size);
    levels = static_cast<int>(std::min(pyr_a.levels.size(), pyr_b.levels.size()));

    Mapping mapping;
    InterestPointGrid prev_grid_a, prev_grid_b;
    CorrespondenceSet result;

    for (int level = levels - 1; level >= 0; --level) {
        const ImageRaster& img_a = pyr_a.levels[level];
        const ImageRaster& img_b = pyr_b.levels[level];
        const InterestPointGrid grid_a = tessellate(img_a, config.patch_size);
        const InterestPointGrid grid_b = tessellate(img_b, config.patch_size);

        const DescriptorSet desc_a =
            level_descriptors(img_a, grid_a, config.descriptor, external.desc_a, level);
        const DescriptorSet desc_b =
            level_descriptors(img_b, grid_b, config.descriptor, external.desc_b, level);
        const SaliencyMap sal_a = level_saliency(img_a, grid_a, config.saliency, external.sal_a, level);
        const SaliencyMap sal_b = level_saliency(img_b, grid_b, config.saliency, external.sal_b, level);

        const JointGraph graph = joint_graph(affinity_submatrix(desc_a, config.sigma),
                                             affinity_submatrix(desc_b, config.sigma),
                                             cross_affinity(desc_a, desc_b, config.sigma));

        // Only the bottom of the spectrum carries cross-image similarity; the
        // modes near and above eigenvalue 1 are the non-positive part of the
        // affinity spectrum and mislead the matching. Capping m at a third of
        // the smaller image's patch count keeps small coarse graphs inside
        // the informative regime.
        int m = config.eigenvectors;
        const int max_m = std::max(1, std::min(grid_a.count(), grid_b.count()) / 3);
        if (m > max_m) {
            warn("match: clamping eigenvectors from " + std::to_string(m) + " to " +
                 std::to_string(max_m) + " at level " + std::to_string(level));
            m = max_m;
        }
        SpectralEmbedding embedding = spectral_embedding(graph, m);

        // Laplacian eigenvalues at or above 1 belong to the non-positive part
        // of the affinity spectrum; those directions carry no similarity
        // structure and at coarse levels they are exactly degenerate. Keep
        // only the informative modes (never fewer than one).
        {
            int keep = 0;
            while (keep < embedding.m && embedding.eigenvalues[keep] < 1.0 - 1e-9) ++keep;
            keep = std::max(keep, 1);
            if (keep < embedding.m) {
                warn("match: dropping " + std::to_string(embedding.m - keep) +
                     " non-informative eigenvectors at level " + std::to_string(level));
                Mat coords(embedding.coords.rows, keep);
                for (int r = 0; r < coords.rows; ++r)
                    for (int k = 0; k < keep; ++k) coords(r, k) = embedding.coords(r, k);
                embedding.coords = std::move(coords);
                embedding.eigenvalues.resize(keep);
                embedding.m = keep;
            }
        }

        LevelContext ctx;
        ctx.embedding = &embedding;
        ctx.normalizer = jsed_normalizer(embedding);
        ctx.desc_a = &desc_a;
        ctx.desc_b = &desc_b;
        ctx.sal_a = &sal_a;
        ctx.sal_b = &sal_b;
        ctx.reg_mode = reg_mode_for(config.descriptor);
        ctx.weights = config.weights;
        ctx.target_rows = grid_b.rows;
        ctx.target_cols = grid_b.cols;

        if (level == levels - 1)
            mapping = init_matching(embedding);
        else
            mapping = project_mapping(mapping, prev_grid_a, prev_grid_b, grid_a, grid_b);

        LevelTrace lt;
        lt.level = level;
        lt.n1 = grid_a.count();
        lt.n2 = grid_b.count();
        lt.m_used = m;
        mapping = refine_level(ctx, std::move(mapping), config.window_radius, config.max_passes,
                               &lt.energies);
        if (trace) trace->levels.push_back(std::move(lt));

        if (level == 0) {
            std::vector<double> costs;
            costs.reserve(mapping.matched_count());
            for (int x = 0; x < mapping.size(); ++x) {
                const int y = mapping.assignments[x];
                if (y == kUnmatched) continue;
                costs.push_back(std::min(1.0, std::max(0.0, pair_cost(ctx, x, y))));
            }
            result = select_subsets(mapping, costs, config.keep_percentile, grid_a, grid_b);
        }
        prev_grid_a = grid_a;
        prev_grid_b = grid_b;
    }
    return result;
}

void write_correspondences(const std::string& path, const CorrespondenceSet& set) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << set.pairs.size() << "\n";
    char buf[160];
    for (const CorrespondencePair& p : set.pairs) {
        std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %.6f %.6f %d\n", p.source.x, p.source.y,
                      p.target.x, p.target.y, p.cost, p.selected ? 1 : 0);
        out << buf;
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

CorrespondenceSet read_correspondences(const std::string& path) {
    const auto lines = textio::read_data_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty correspondence file");
    const std::string ctx0 = path + ":" + std::to_string(lines[0].number);
    const auto header = textio::split_ws(lines[0].text);
    if (header.size() != 1) throw std::runtime_error(ctx0 + ": expected header 'n'");
    const long n = textio::parse_long(header[0], ctx0);
    if (static_cast<long>(lines.size()) - 1 != n)
        throw std::runtime_error(path + ": correspondence count mismatch");

    CorrespondenceSet set;
    set.pairs.reserve(static_cast<std::size_t>(n));
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string ctx = path + ":" + std::to_string(lines[li].number);
        const auto toks = textio::split_ws(lines[li].text);
        if (toks.size() != 6)
            throw std::runtime_error(ctx + ": expected 'x1 y1 x2 y2 cost selected'");
        CorrespondencePair p;
        p.source.x = textio::parse_double(toks[0], ctx);
        p.source.y = textio::parse_double(toks[1], ctx);
        p.target.x = textio::parse_double(toks[2], ctx);
        p.target.y = textio::parse_double(toks[3], ctx);
        p.cost = textio::parse_double(toks[4], ctx);
        const long sel = textio::parse_long(toks[5], ctx);
        if (sel != 0 && sel != 1) throw std::runtime_error(ctx + ": selected flag must be 0 or 1");
        p.selected = sel == 1;
        set.pairs.push_back(p);
    }
    return set;
}

} // namespace specorr
