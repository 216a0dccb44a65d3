#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "specorr/metrics.hpp"
#include "specorr/optimizer.hpp"

namespace specorr {

// One manifest row. Optional fields may be "-" placeholders; relative paths
// are resolved against the manifest's directory at load time.
struct PairRecord {
    std::string pair_id;
    std::string path_a;
    std::string path_b;
    std::string annot_path;
    std::optional<Difficulty> declared_difficulty;
    std::string desc_a, desc_b; // external descriptor sidecars, may be empty
    std::string sal_a, sal_b;   // external saliency sidecars, may be empty
};

// Annotation file: lines "x1 y1 x2 y2", '#' comments allowed. With >= 4
// pairs a homography is fitted and attached (skipped with a warning when the
// configuration is degenerate).
GroundTruth load_annotations(const std::string& path);

// Manifest line: "pair_id path_a path_b annot_path [difficulty]
// [desc_a desc_b] [sal_a sal_b]".
std::vector<PairRecord> load_manifest(const std::string& path);

struct PairRow {
    std::string pair_id;
    Difficulty difficulty = Difficulty::easy;
    std::vector<double> r2; // one per tau
    double mae_value = 0.0;
    bool failed = false;
    std::string error;
};

struct EvalReport {
    std::vector<double> taus;
    double rho = 10.0;
    double theta = 5.0;
    MatchConfig config;
    std::vector<PairRow> rows; // manifest order
    // aggregates over non-failed rows, manifest order
    std::vector<double> r2_easy;      // per tau; empty split leaves 0 with count 0
    std::vector<double> r2_difficult;
    double mae_mean = 0.0;
    int easy_count = 0;
    int difficult_count = 0;
    int failure_count = 0;
};

// Runs the matcher over every record and aggregates R2 per tau split by
// difficulty plus overall MAE. Per-pair failures are recorded and excluded
// from the means. workers > 1 evaluates pairs concurrently; aggregation is
// always in manifest order so reports are identical for any worker count.
EvalReport evaluate_dataset(const std::vector<PairRecord>& records, const MatchConfig& config,
                            const std::vector<double>& taus, double rho, double theta,
                            int workers = 1);

// Human-readable aligned table.
void write_report_table(std::ostream& out, const EvalReport& report);
// Machine-readable companion: '#' header lines carry the aggregates at full
// precision, then one line per pair "pair_id difficulty R2@tau... MAE".
void write_report_rows(std::ostream& out, const EvalReport& report);

} // namespace specorr
