#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "specorr/dataset.hpp"
#include "specorr/synth.hpp"

using namespace specorr;

namespace {

std::filesystem::path test_dir(const std::string& sub) {
    auto dir = std::filesystem::temp_directory_path() / "specorr_tests" / sub;
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

} // namespace

TEST_CASE("load_annotations fits a homography for >= 4 pairs") {
    const auto dir = test_dir("annot");
    // pairs generated by the translation (x,y) -> (x+5, y-2)
    write_file(dir / "five.txt",
               "# comment line\n"
               "0 0 5 -2\n10 0 15 -2\n0 10 5 8\n10 10 15 8\n4 6 9 4\n");
    const GroundTruth gt = load_annotations((dir / "five.txt").string());
    REQUIRE(gt.pairs.size() == 5);
    REQUIRE(gt.homography.has_value());
    CHECK(std::abs(gt.homography->h(0, 2) - 5.0) <= 1e-8);
    CHECK(std::abs(gt.homography->h(1, 2) + 2.0) <= 1e-8);
}

TEST_CASE("load_annotations below 4 pairs has no homography") {
    const auto dir = test_dir("annot");
    write_file(dir / "three.txt", "0 0 1 1\n2 2 3 3\n4 0 5 1\n");
    const GroundTruth gt = load_annotations((dir / "three.txt").string());
    CHECK(gt.pairs.size() == 3);
    CHECK_FALSE(gt.homography.has_value());
}

TEST_CASE("load_annotations reports malformed lines with their number") {
    const auto dir = test_dir("annot");
    write_file(dir / "bad.txt", "0 0 1 1\na b c d\n");
    CHECK_THROWS_WITH_AS(load_annotations((dir / "bad.txt").string()), doctest::Contains(":2"),
                         std::runtime_error);
    write_file(dir / "empty.txt", "# nothing\n");
    CHECK_THROWS_AS(load_annotations((dir / "empty.txt").string()), std::runtime_error);
}

TEST_CASE("load_manifest parses records and optional fields") {
    const auto dir = test_dir("manifest");
    write_file(dir / "m.txt",
               "p1 a1.pgm b1.pgm g1.txt\n"
               "p2 a2.pgm b2.pgm g2.txt easy\n"
               "p3 a3.pgm b3.pgm g3.txt difficult d3a.txt d3b.txt s3a.txt s3b.txt\n");
    const auto records = load_manifest((dir / "m.txt").string());
    REQUIRE(records.size() == 3);
    CHECK_FALSE(records[0].declared_difficulty.has_value());
    CHECK(records[1].declared_difficulty == Difficulty::easy);
    CHECK(records[2].declared_difficulty == Difficulty::difficult);
    CHECK(records[2].desc_a == (dir / "d3a.txt").string());
    CHECK(records[2].sal_b == (dir / "s3b.txt").string());
    // relative paths resolve against the manifest directory
    CHECK(records[0].path_a == (dir / "a1.pgm").string());
}

TEST_CASE("load_manifest rejects duplicates and bad rows") {
    const auto dir = test_dir("manifest");
    write_file(dir / "dup.txt", "p1 a b c\np1 d e f\n");
    CHECK_THROWS_WITH_AS(load_manifest((dir / "dup.txt").string()), doctest::Contains("p1"),
                         std::runtime_error);
    write_file(dir / "short.txt", "p1 a b\n");
    CHECK_THROWS_AS(load_manifest((dir / "short.txt").string()), std::runtime_error);
    write_file(dir / "trail.txt", "p1 a b c easy d1 d2 s1 s2 extra\n");
    CHECK_THROWS_AS(load_manifest((dir / "trail.txt").string()), std::runtime_error);
}

TEST_CASE("evaluate_dataset self-pair scores perfectly") {
    const auto dir = test_dir("eval_self");
    const ImageRaster img = procedural_texture(64, 64, 9);
    write_pgm((dir / "img.pgm").string(), img);
    // identity ground truth on interior patch centers
    std::ostringstream annot;
    for (const Point p : {Point{24, 24}, Point{40, 24}, Point{24, 40}, Point{40, 40}, Point{8, 8}})
        annot << p.x << " " << p.y << " " << p.x << " " << p.y << "\n";
    write_file(dir / "gt.txt", annot.str());
    write_file(dir / "manifest.txt", "self img.pgm img.pgm gt.txt\n");

    MatchConfig cfg;
    cfg.weights = EnergyWeights{1.0, 0.0, 0.0};
    const auto records = load_manifest((dir / "manifest.txt").string());
    const EvalReport report = evaluate_dataset(records, cfg, {10.0, 40.0}, 10.0, 5.0);
    REQUIRE(report.rows.size() == 1);
    CHECK_FALSE(report.rows[0].failed);
    CHECK(report.rows[0].difficulty == Difficulty::easy);
    CHECK(report.rows[0].r2[0] == 1.0);
    CHECK(report.rows[0].r2[1] == 1.0);
    CHECK(report.rows[0].mae_value == 0.0);
    CHECK(report.mae_mean == 0.0);
}

TEST_CASE("evaluate_dataset splits, failures and aggregation audit") {
    const auto dir = test_dir("eval_split");
    const SynthConfig synth_cfg{2, 2, 96, 96, 16, 6, 11};
    const std::string manifest = generate_synthetic_dataset((dir / "mini").string(), synth_cfg);

    auto records = load_manifest(manifest);
    REQUIRE(records.size() == 4);
    // break one record to exercise failure isolation
    records.push_back(records[0]);
    records.back().pair_id = "broken";
    records.back().path_a = (dir / "missing.pgm").string();

    MatchConfig cfg;
    const std::vector<double> taus{10.0, 40.0};
    const EvalReport report = evaluate_dataset(records, cfg, taus, 10.0, 5.0, 2);

    CHECK(report.failure_count == 1);
    CHECK(report.easy_count == 2);
    CHECK(report.difficult_count == 2);

    // recompute the means from rows
    for (std::size_t t = 0; t < taus.size(); ++t) {
        double easy_sum = 0.0, diff_sum = 0.0;
        for (const PairRow& row : report.rows) {
            if (row.failed) continue;
            (row.difficulty == Difficulty::easy ? easy_sum : diff_sum) += row.r2[t];
        }
        CHECK(std::abs(report.r2_easy[t] - easy_sum / 2.0) <= 1e-12);
        CHECK(std::abs(report.r2_difficult[t] - diff_sum / 2.0) <= 1e-12);
    }
    double mae_sum = 0.0;
    for (const PairRow& row : report.rows)
        if (!row.failed) mae_sum += row.mae_value;
    CHECK(std::abs(report.mae_mean - mae_sum / 4.0) <= 1e-12);

    SUBCASE("shuffling the manifest only reorders rows") {
        auto shuffled = records;
        std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
        const EvalReport r2 = evaluate_dataset(shuffled, cfg, taus, 10.0, 5.0);
        for (const PairRow& row : report.rows) {
            const auto it = std::find_if(r2.rows.begin(), r2.rows.end(),
                                         [&](const PairRow& o) { return o.pair_id == row.pair_id; });
            REQUIRE(it != r2.rows.end());
            CHECK(it->failed == row.failed);
            if (!row.failed) {
                CHECK(it->mae_value == row.mae_value);
                CHECK(it->r2 == row.r2);
            }
        }
        for (std::size_t t = 0; t < taus.size(); ++t)
            CHECK(std::abs(r2.r2_easy[t] - report.r2_easy[t]) <= 1e-12);
    }

    SUBCASE("declared difficulty overrides the classifier") {
        auto flipped = records;
        flipped.resize(4);
        for (auto& rec : flipped) rec.declared_difficulty = Difficulty::difficult;
        const EvalReport r3 = evaluate_dataset(flipped, cfg, taus, 10.0, 5.0);
        CHECK(r3.easy_count == 0);
        CHECK(r3.difficult_count == 4);
    }
}

TEST_CASE("report writers emit parseable aggregates") {
    const auto dir = test_dir("report");
    const SynthConfig synth_cfg{1, 1, 96, 96, 16, 6, 21};
    const std::string manifest = generate_synthetic_dataset((dir / "mini").string(), synth_cfg);
    const auto records = load_manifest(manifest);
    MatchConfig cfg;
    const EvalReport report = evaluate_dataset(records, cfg, {10.0, 20.0}, 10.0, 5.0);

    std::ostringstream table, rows;
    write_report_table(table, report);
    write_report_rows(rows, report);
    CHECK(table.str().find("config:") != std::string::npos);
    CHECK(table.str().find("R2(easy)") != std::string::npos);
    CHECK(rows.str().find("# taus") != std::string::npos);
    CHECK(rows.str().find("# mae") != std::string::npos);

    // every non-failed pair appears once in the rows file
    int data_lines = 0;
    std::istringstream in(rows.str());
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++data_lines;
    CHECK(data_lines == 2);
}

TEST_CASE("synthetic generator respects declared difficulty splits") {
    const auto dir = test_dir("synthgen");
    const SynthConfig cfg{2, 2, 96, 96, 16, 6, 5};
    const std::string manifest = generate_synthetic_dataset((dir / "mini").string(), cfg);
    const auto records = load_manifest(manifest);
    REQUIRE(records.size() == 4);
    int easy = 0, difficult = 0;
    for (const auto& rec : records) {
        REQUIRE(rec.declared_difficulty.has_value());
        (*rec.declared_difficulty == Difficulty::easy ? easy : difficult) += 1;
        CHECK(std::filesystem::exists(rec.path_a));
        CHECK(std::filesystem::exists(rec.path_b));
        const GroundTruth gt = load_annotations(rec.annot_path);
        CHECK(gt.pairs.size() >= 5);
    }
    CHECK(easy == 2);
    CHECK(difficult == 2);
}
