#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairbench/metrics.hpp"
#include "fairbench/scott_knott.hpp"
#include "fairbench/tabular.hpp"
#include "fairbench/xfair.hpp"

namespace fairbench {

inline const std::vector<std::string> kAllMethods = {"baseline_rf", "random", "reweighing",
                                                     "fair_smote", "xfair"};

struct ExperimentConfig {
    std::string manifest_path;
    std::vector<std::string> protected_attrs;  // empty = all declared in the manifest
    std::vector<std::string> methods = kAllMethods;
    std::size_t repeats = 20;
    std::uint64_t base_seed = 0;
    LearnerKind classifier = LearnerKind::RandomForest;
    LearnerKind extrapolation = LearnerKind::Cart;
    std::size_t budget = 5;
    std::string output_dir;
    bool fair_smote_situation_filter = false;
    /// 0 = FAIRBENCH_THREADS env var, falling back to hardware concurrency.
    std::size_t threads = 0;
};

/// One (dataset, method, protected attribute, repeat) trial.
struct RunRecord {
    std::string dataset;
    std::string method;
    std::string protected_attr;
    std::uint64_t seed = 0;
    FairnessReport fairness;
    PerformanceReport performance;
    double wall_clock_seconds = 0.0;
};

/// Repeat i splits with seed base_seed + i; all methods share that split.
/// Wall clock covers the method's fit + mitigate + predict path.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

/// Same rig with the dataset supplied directly (synthetic benchmarks, tests).
std::vector<RunRecord> run_experiment_on(const TabularDataset& dataset,
                                         const ExperimentConfig& config);

struct SummaryRow {
    std::string dataset;
    std::string protected_attr;
    std::string metric;
    std::string method;
    std::optional<double> median_value;
    std::optional<int> rank;  // empty when the method had undefined values
};

struct Summary {
    std::vector<SummaryRow> rows;
};

/// Median per (dataset, protected, metric, method) plus Scott-Knott ranks.
/// Fairness metrics rank smaller-is-better; performance metrics are negated
/// before ranking. Needs >= 2 repeats per method.
Summary summarize(std::span<const RunRecord> records);

/// median wall clock of `numerator` / median wall clock of `denominator`.
double runtime_ratio(std::span<const RunRecord> records, std::string_view numerator,
                     std::string_view denominator);

/// Fig. 2/3 data: one CSV row per (ratio_kind, scope); undefined ratios
/// serialize as "NA".
void export_fig_data(const XFairPipeline& pipeline, const TabularDataset& test,
                     const std::filesystem::path& out_path);

// results.csv round-trip (column order is part of the file contract).
void write_results_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_results_csv(const std::filesystem::path& path);

void write_summary_csv(std::ostream& out, const Summary& summary);
std::string render_summary_table(const Summary& summary);

std::string format_double(double value);

}  // namespace fairbench
