#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "specorr/dataset.hpp"
#include "specorr/overlay.hpp"
#include "specorr/synth.hpp"
#include "specorr/textio.hpp"

namespace {

using namespace specorr;

struct MatchFlags {
    MatchConfig config;
    double lambda1 = 0.75, lambda2 = 0.10, lambda3 = 0.15;
    std::string descriptor = "hog";
    std::string saliency = "gradient";
};

void add_match_options(CLI::App* cmd, MatchFlags& f) {
    cmd->add_option("--patch-size", f.config.patch_size, "Tessellation patch size in pixels")
        ->capture_default_str();
    cmd->add_option("--eigs", f.config.eigenvectors, "Number of non-trivial eigenvectors")
        ->capture_default_str();
    cmd->add_option("--levels", f.config.levels, "Pyramid levels")->capture_default_str();
    cmd->add_option("--window", f.config.window_radius,
                    "Search window radius in target patches (Chebyshev)")
        ->capture_default_str();
    cmd->add_option("--max-passes", f.config.max_passes, "Refinement passes per level")
        ->capture_default_str();
    cmd->add_option("--keep-percentile", f.config.keep_percentile,
                    "Cost percentile kept in the selected subset")
        ->capture_default_str();
    cmd->add_option("--sigma", f.config.sigma, "Affinity bandwidth")->capture_default_str();
    cmd->add_option("--lambda1", f.lambda1, "Embedding-distance term weight")->capture_default_str();
    cmd->add_option("--lambda2", f.lambda2, "Appearance term weight")->capture_default_str();
    cmd->add_option("--lambda3", f.lambda3, "Saliency term weight")->capture_default_str();
    cmd->add_option("--descriptor", f.descriptor, "Descriptor mode: mpi, hog or external")
        ->capture_default_str()
        ->check(CLI::IsMember({"mpi", "hog", "external"}));
    cmd->add_option("--saliency", f.saliency, "Saliency mode: gradient, external or none")
        ->capture_default_str()
        ->check(CLI::IsMember({"gradient", "external", "none"}));
}

MatchConfig resolve_config(const MatchFlags& f) {
    MatchConfig c = f.config;
    c.weights = EnergyWeights{f.lambda1, f.lambda2, f.lambda3};
    validate_weights(c.weights);
    c.descriptor = f.descriptor == "mpi"
                       ? DescriptorMode::mpi
                       : (f.descriptor == "hog" ? DescriptorMode::hog : DescriptorMode::external);
    c.saliency = f.saliency == "gradient"
                     ? SaliencyMode::gradient
                     : (f.saliency == "external" ? SaliencyMode::external : SaliencyMode::none);
    return c;
}

int run(int argc, char** argv) {
    CLI::App app{"spectral correspondence matching for grayscale image pairs"};
    app.require_subcommand(1);

    // match
    auto* match = app.add_subcommand("match", "Match two images and write a correspondence file");
    MatchFlags match_flags;
    std::string match_a, match_b, match_out = "correspondences.txt";
    std::string desc_a, desc_b, sal_a, sal_b, dump_spectrum_path;
    match->add_option("image_a", match_a, "Source image (PGM/PPM)")->required();
    match->add_option("image_b", match_b, "Target image (PGM/PPM)")->required();
    add_match_options(match, match_flags);
    match->add_option("--desc-a", desc_a, "External descriptor file for image A");
    match->add_option("--desc-b", desc_b, "External descriptor file for image B");
    match->add_option("--sal-a", sal_a, "External saliency file for image A");
    match->add_option("--sal-b", sal_b, "External saliency file for image B");
    match->add_option("--dump-spectrum", dump_spectrum_path,
                      "Write the finest-level eigenvalues and embedding to this path");
    match->add_option("-o,--output", match_out, "Correspondence output file")->capture_default_str();

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a manifest of annotated pairs");
    MatchFlags eval_flags;
    std::string manifest_path, eval_out = "report.txt";
    std::vector<double> taus{10.0, 20.0, 30.0, 40.0};
    double rho = 10.0, theta = 5.0;
    int workers = 1;
    eval->add_option("manifest", manifest_path, "Manifest file")->required();
    add_match_options(eval, eval_flags);
    eval->add_option("--tau", taus, "Correspondence error thresholds")
        ->delimiter(',')
        ->capture_default_str();
    eval->add_option("--rho", rho, "Reprojection threshold for easy/difficult classification")
        ->capture_default_str();
    eval->add_option("--theta", theta, "Source gate radius for R2 candidates")->capture_default_str();
    eval->add_option("--workers", workers, "Concurrent pair evaluations")->capture_default_str();
    eval->add_option("-o,--output", eval_out, "Report path (rows companion at <path>.rows)")
        ->capture_default_str();

    // overlay
    auto* overlay = app.add_subcommand("overlay", "Render a side-by-side correspondence overlay");
    std::string ov_a, ov_b, ov_corr, ov_out = "overlay.ppm", ov_annot;
    double valid_window = 15.0;
    overlay->add_option("image_a", ov_a, "Source image")->required();
    overlay->add_option("image_b", ov_b, "Target image")->required();
    overlay->add_option("correspondences", ov_corr, "Correspondence file")->required();
    overlay->add_option("--annot", ov_annot,
                        "Annotation file; colors pairs valid/invalid against it");
    overlay->add_option("--valid-window", valid_window, "Validity window side length in pixels")
        ->capture_default_str();
    overlay->add_option("-o,--output", ov_out, "Output PPM path")->capture_default_str();

    // homography
    auto* homog = app.add_subcommand("homography", "Fit a homography from an annotation file");
    std::string hg_annot, hg_out = "homography.txt", hg_points, hg_interp;
    homog->add_option("annotations", hg_annot, "Annotation file with >= 4 pairs")->required();
    homog->add_option("-o,--output", hg_out, "Homography output file")->capture_default_str();
    homog->add_option("--points", hg_points, "File of 'x y' points to interpolate");
    homog->add_option("--interpolated", hg_interp, "Output path for interpolated points");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated mini-dataset");
    SynthConfig synth_cfg;
    std::string synth_dir;
    synth->add_option("out_dir", synth_dir, "Output directory")->required();
    synth->add_option("--pairs-easy", synth_cfg.pairs_easy, "Easy pair count")->capture_default_str();
    synth->add_option("--pairs-difficult", synth_cfg.pairs_difficult, "Difficult pair count")
        ->capture_default_str();
    synth->add_option("--size", synth_cfg.width, "Image side length in pixels")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "Generator seed")->capture_default_str();
    synth->add_option("--gt-points", synth_cfg.gt_points, "Ground-truth pairs per image pair")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the message naming the flag
        return code == 0 ? 0 : 2;
    }

    if (match->parsed()) {
        const MatchConfig cfg = resolve_config(match_flags);
        if (cfg.descriptor == DescriptorMode::external && (desc_a.empty() || desc_b.empty()))
            throw std::runtime_error("--descriptor external requires --desc-a and --desc-b");
        if (cfg.saliency == SaliencyMode::external && (sal_a.empty() || sal_b.empty()))
            throw std::runtime_error("--saliency external requires --sal-a and --sal-b");
        const ImageRaster a = load_raster(match_a);
        const ImageRaster b = load_raster(match_b);
        ExternalInputs ext{desc_a, desc_b, sal_a, sal_b};
        const CorrespondenceSet set = match_multiresolution(a, b, ext, cfg);
        write_correspondences(match_out, set);
        if (!dump_spectrum_path.empty()) {
            // rebuild the finest-level embedding for the dump
            const InterestPointGrid ga = tessellate(a, cfg.patch_size);
            const InterestPointGrid gb = tessellate(b, cfg.patch_size);
            const DescriptorSet da = cfg.descriptor == DescriptorMode::mpi ? mpi_descriptor(a, ga)
                                     : cfg.descriptor == DescriptorMode::hog
                                         ? hog_descriptor(a, ga)
                                         : load_descriptors(desc_a, ga);
            const DescriptorSet db = cfg.descriptor == DescriptorMode::mpi ? mpi_descriptor(b, gb)
                                     : cfg.descriptor == DescriptorMode::hog
                                         ? hog_descriptor(b, gb)
                                         : load_descriptors(desc_b, gb);
            const JointGraph g = joint_graph(affinity_submatrix(da, cfg.sigma),
                                             affinity_submatrix(db, cfg.sigma),
                                             cross_affinity(da, db, cfg.sigma));
            const int m = std::min(cfg.eigenvectors, ga.count() + gb.count() - 1);
            std::ofstream out(dump_spectrum_path, std::ios::binary);
            if (!out) throw std::runtime_error(dump_spectrum_path + ": cannot open for writing");
            dump_spectrum(out, spectral_embedding(g, m));
        }
        return 0;
    }

    if (eval->parsed()) {
        const MatchConfig cfg = resolve_config(eval_flags);
        const auto records = load_manifest(manifest_path);
        const EvalReport report = evaluate_dataset(records, cfg, taus, rho, theta, workers);
        std::ofstream table(eval_out, std::ios::binary);
        if (!table) throw std::runtime_error(eval_out + ": cannot open for writing");
        write_report_table(table, report);
        const std::string rows_path = eval_out + ".rows";
        std::ofstream rows(rows_path, std::ios::binary);
        if (!rows) throw std::runtime_error(rows_path + ": cannot open for writing");
        write_report_rows(rows, report);
        return 0;
    }

    if (overlay->parsed()) {
        const ImageRaster a = load_raster(ov_a);
        const ImageRaster b = load_raster(ov_b);
        const CorrespondenceSet set = read_correspondences(ov_corr);
        GroundTruth gt;
        const bool with_gt = !ov_annot.empty();
        if (with_gt) gt = load_annotations(ov_annot);
        const OverlayImage img = render_overlay(a, b, set, with_gt ? &gt : nullptr, valid_window);
        write_ppm(ov_out, img.width, img.height, img.rgb);
        return 0;
    }

    if (homog->parsed()) {
        const GroundTruth gt = load_annotations(hg_annot);
        if (gt.pairs.size() < 4)
            throw std::runtime_error(hg_annot + ": need at least 4 pairs to fit a homography");
        const Homography h = estimate_homography(gt.pairs);
        write_homography(hg_out, h);
        if (!hg_points.empty()) {
            if (hg_interp.empty())
                throw std::runtime_error("--points requires --interpolated for the output path");
            const auto lines = textio::read_data_lines(hg_points);
            std::vector<Point> pts;
            for (const auto& line : lines) {
                const std::string ctx = hg_points + ":" + std::to_string(line.number);
                const auto toks = textio::split_ws(line.text);
                if (toks.size() != 2) throw std::runtime_error(ctx + ": expected 'x y'");
                pts.push_back({textio::parse_double(toks[0], ctx), textio::parse_double(toks[1], ctx)});
            }
            const auto projected = interpolate_keypoints(h, pts);
            std::ofstream out(hg_interp, std::ios::binary);
            if (!out) throw std::runtime_error(hg_interp + ": cannot open for writing");
            char buf[128];
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (projected[i].at_infinity) {
                    std::snprintf(buf, sizeof buf, "%.6f %.6f inf\n", pts[i].x, pts[i].y);
                } else {
                    std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %.6f\n", pts[i].x, pts[i].y,
                                  projected[i].x, projected[i].y);
                }
                out << buf;
            }
        }
        return 0;
    }

    if (synth->parsed()) {
        synth_cfg.height = synth_cfg.width;
        const std::string manifest = generate_synthetic_dataset(synth_dir, synth_cfg);
        std::cout << manifest << "\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
