#include "specorr/dataset.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <thread>

#include "specorr/log.hpp"
#include "specorr/textio.hpp"

namespace specorr {

GroundTruth load_annotations(const std::string& path) {
    const auto lines = textio::read_data_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": no annotation pairs");

    GroundTruth gt;
    gt.pairs.reserve(lines.size());
    for (const auto& line : lines) {
        const std::string ctx = path + ":" + std::to_string(line.number);
        const auto toks = textio::split_ws(line.text);
        if (toks.size() != 4) throw std::runtime_error(ctx + ": expected 'x1 y1 x2 y2'");
        Point s{textio::parse_double(toks[0], ctx), textio::parse_double(toks[1], ctx)};
        Point t{textio::parse_double(toks[2], ctx), textio::parse_double(toks[3], ctx)};
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(t.x) || !std::isfinite(t.y))
            throw std::runtime_error(ctx + ": non-finite coordinate");
        gt.pairs.emplace_back(s, t);
    }
    if (gt.pairs.size() >= 4) {
        try {
            gt.homography = estimate_homography(gt.pairs);
        } catch (const std::exception& e) {
            warn(path + ": homography fit skipped (" + e.what() + ")");
        }
    }
    return gt;
}

namespace {

std::string resolve_path(const std::filesystem::path& base_dir, const std::string& p) {
    if (p.empty() || p == "-") return "";
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return fp.string();
    return (base_dir / fp).string();
}

} // namespace

std::vector<PairRecord> load_manifest(const std::string& path) {
    const auto lines = textio::read_data_lines(path);
    const std::filesystem::path base_dir = std::filesystem::path(path).parent_path();

    std::vector<PairRecord> records;
    std::set<std::string> seen;
    for (const auto& line : lines) {
        const std::string ctx = path + ":" + std::to_string(line.number);
        auto toks = textio::split_ws(line.text);
        if (toks.size() < 4)
            throw std::runtime_error(ctx + ": expected 'pair_id path_a path_b annot_path ...'");

        PairRecord rec;
        rec.pair_id = toks[0];
        rec.path_a = resolve_path(base_dir, toks[1]);
        rec.path_b = resolve_path(base_dir, toks[2]);
        rec.annot_path = resolve_path(base_dir, toks[3]);
        std::size_t i = 4;
        if (i < toks.size() && (toks[i] == "easy" || toks[i] == "difficult" || toks[i] == "-")) {
            if (toks[i] == "easy") rec.declared_difficulty = Difficulty::easy;
            if (toks[i] == "difficult") rec.declared_difficulty = Difficulty::difficult;
            ++i;
        }
        if (i < toks.size()) {
            if (toks.size() - i < 2)
                throw std::runtime_error(ctx + ": descriptor sidecars need both desc_a and desc_b");
            rec.desc_a = resolve_path(base_dir, toks[i]);
            rec.desc_b = resolve_path(base_dir, toks[i + 1]);
            i += 2;
        }
        if (i < toks.size()) {
            if (toks.size() - i < 2)
                throw std::runtime_error(ctx + ": saliency sidecars need both sal_a and sal_b");
            rec.sal_a = resolve_path(base_dir, toks[i]);
            rec.sal_b = resolve_path(base_dir, toks[i + 1]);
            i += 2;
        }
        if (i != toks.size()) throw std::runtime_error(ctx + ": unreadable trailing fields");
        if (!seen.insert(rec.pair_id).second)
            throw std::runtime_error(ctx + ": duplicate pair_id '" + rec.pair_id + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

PairRow evaluate_one(const PairRecord& rec, const MatchConfig& config,
                     const std::vector<double>& taus, double rho, double theta) {
    PairRow row;
    row.pair_id = rec.pair_id;
    row.r2.assign(taus.size(), 0.0);
    try {
        const ImageRaster img_a = load_raster(rec.path_a);
        const ImageRaster img_b = load_raster(rec.path_b);
        GroundTruth gt = load_annotations(rec.annot_path);

        if (rec.declared_difficulty) {
            row.difficulty = *rec.declared_difficulty;
        } else if (gt.homography) {
            row.difficulty = classify_pair(*gt.homography, gt.pairs, rho);
        } else {
            throw std::runtime_error(rec.annot_path +
                                     ": difficulty not declared and not classifiable (< 4 pairs)");
        }

        ExternalInputs ext;
        ext.desc_a = rec.desc_a;
        ext.desc_b = rec.desc_b;
        ext.sal_a = rec.sal_a;
        ext.sal_b = rec.sal_b;
        const CorrespondenceSet pred = match_multiresolution(img_a, img_b, ext, config);

        for (std::size_t t = 0; t < taus.size(); ++t)
            row.r2[t] = correspondence_r2(gt, pred, taus[t], theta);
        const double diag = std::hypot(static_cast<double>(img_b.width),
                                       static_cast<double>(img_b.height));
        row.mae_value = mae(gt, pred, diag);
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

} // namespace

EvalReport evaluate_dataset(const std::vector<PairRecord>& records, const MatchConfig& config,
                            const std::vector<double>& taus, double rho, double theta,
                            int workers) {
    if (records.empty()) throw std::invalid_argument("evaluate_dataset: empty manifest");
    if (taus.empty()) throw std::invalid_argument("evaluate_dataset: empty tau list");
    if (workers < 1) throw std::invalid_argument("evaluate_dataset: workers must be >= 1");

    EvalReport report;
    report.taus = taus;
    report.rho = rho;
    report.theta = theta;
    report.config = config;
    report.rows.resize(records.size());

    const int n = static_cast<int>(records.size());
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            report.rows[i] = evaluate_one(records[i], config, taus, rho, theta);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Aggregate in manifest order so output is worker-count independent.
    report.r2_easy.assign(taus.size(), 0.0);
    report.r2_difficult.assign(taus.size(), 0.0);
    double mae_sum = 0.0;
    for (const PairRow& row : report.rows) {
        if (row.failed) {
            ++report.failure_count;
            warn("eval: pair '" + row.pair_id + "' failed: " + row.error);
            continue;
        }
        auto& split = row.difficulty == Difficulty::easy ? report.r2_easy : report.r2_difficult;
        for (std::size_t t = 0; t < taus.size(); ++t) split[t] += row.r2[t];
        (row.difficulty == Difficulty::easy ? report.easy_count : report.difficult_count) += 1;
        mae_sum += row.mae_value;
    }
    const int ok = report.easy_count + report.difficult_count;
    if (report.easy_count > 0)
        for (double& v : report.r2_easy) v /= report.easy_count;
    if (report.difficult_count > 0)
        for (double& v : report.r2_difficult) v /= report.difficult_count;
    if (ok > 0) report.mae_mean = mae_sum / ok;
    return report;
}

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

const char* descriptor_name(DescriptorMode m) {
    switch (m) {
    case DescriptorMode::mpi: return "mpi";
    case DescriptorMode::hog: return "hog";
    case DescriptorMode::external: return "external";
    }
    return "?";
}

const char* saliency_name(SaliencyMode m) {
    switch (m) {
    case SaliencyMode::gradient: return "gradient";
    case SaliencyMode::external: return "external";
    case SaliencyMode::none: return "none";
    }
    return "?";
}

std::string config_echo(const EvalReport& r) {
    const MatchConfig& c = r.config;
    std::string s;
    s += "patch-size=" + std::to_string(c.patch_size);
    s += " eigs=" + std::to_string(c.eigenvectors);
    s += " levels=" + std::to_string(c.levels);
    s += " window=" + std::to_string(c.window_radius);
    s += " max-passes=" + std::to_string(c.max_passes);
    s += " keep-percentile=" + fmt("%g", c.keep_percentile);
    s += " sigma=" + fmt("%g", c.sigma);
    s += " lambda=" + fmt("%g", c.weights.lambda1) + "," + fmt("%g", c.weights.lambda2) + "," +
         fmt("%g", c.weights.lambda3);
    s += std::string(" descriptor=") + descriptor_name(c.descriptor);
    s += std::string(" saliency=") + saliency_name(c.saliency);
    s += " rho=" + fmt("%g", r.rho);
    s += " theta=" + fmt("%g", r.theta);
    return s;
}

} // namespace

void write_report_table(std::ostream& out, const EvalReport& report) {
    out << "pair evaluation report\n";
    out << "config: " << config_echo(report) << "\n";
    out << "pairs: " << report.rows.size() << "  easy: " << report.easy_count
        << "  difficult: " << report.difficult_count << "  failures: " << report.failure_count
        << "\n\n";

    out << "tau        R2(easy) / R2(difficult)\n";
    for (std::size_t t = 0; t < report.taus.size(); ++t) {
        out << fmt("%-10.2f", report.taus[t]) << " ";
        out << (report.easy_count > 0 ? fmt("%.6f", report.r2_easy[t]) : std::string("-"));
        out << " / ";
        out << (report.difficult_count > 0 ? fmt("%.6f", report.r2_difficult[t]) : std::string("-"));
        out << "\n";
    }
    out << "MAE        "
        << (report.easy_count + report.difficult_count > 0 ? fmt("%.6f", report.mae_mean)
                                                           : std::string("-"))
        << "\n\n";

    out << "pair_id      difficulty ";
    for (double tau : report.taus) out << fmt("R2@%-7.0f", tau);
    out << "MAE\n";
    for (const PairRow& row : report.rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-12s", row.pair_id.c_str());
        out << buf << " ";
        if (row.failed) {
            out << "FAILED     " << row.error << "\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%-10s", row.difficulty == Difficulty::easy ? "easy" : "difficult");
        out << buf << " ";
        for (double v : row.r2) out << fmt("%-10.6f", v);
        out << fmt("%.6f", row.mae_value) << "\n";
    }
}

void write_report_rows(std::ostream& out, const EvalReport& report) {
    out << "# taus";
    for (double tau : report.taus) out << " " << fmt("%.17g", tau);
    out << "\n";
    out << "# counts easy " << report.easy_count << " difficult " << report.difficult_count
        << " failures " << report.failure_count << "\n";
    out << "# r2_easy";
    for (std::size_t t = 0; t < report.taus.size(); ++t)
        out << " " << (report.easy_count > 0 ? fmt("%.17g", report.r2_easy[t]) : std::string("-"));
    out << "\n";
    out << "# r2_difficult";
    for (std::size_t t = 0; t < report.taus.size(); ++t)
        out << " "
            << (report.difficult_count > 0 ? fmt("%.17g", report.r2_difficult[t]) : std::string("-"));
    out << "\n";
    out << "# mae "
        << (report.easy_count + report.difficult_count > 0 ? fmt("%.17g", report.mae_mean)
                                                           : std::string("-"))
        << "\n";
    for (const PairRow& row : report.rows) {
        if (row.failed) {
            out << "# failed " << row.pair_id << "\n";
            continue;
        }
        out << row.pair_id << " " << (row.difficulty == Difficulty::easy ? "easy" : "difficult");
        for (double v : row.r2) out << " " << fmt("%.17g", v);
        out << " " << fmt("%.17g", row.mae_value) << "\n";
    }
}

} // namespace specorr
