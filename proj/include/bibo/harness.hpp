#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bibo/dataset.hpp"
#include "bibo/imputation.hpp"
#include "bibo/metrics.hpp"
#include "bibo/noise.hpp"
#include "bibo/rng.hpp"
#include "bibo/types.hpp"

namespace bibo {

inline constexpr std::uint64_t kDefaultMasterSeed = 1729;

// Error sweep: a zero control level (no flips) followed by
// start, start+step, ..., up to max_err.
struct SweepSpec {
    double start = 0.5;
    double step = 0.5;
    double max_err = 3.0;  // MERR
    bool include_zero_control = true;

    std::vector<double> levels() const;
};

struct RunConfig {
    std::string dataset_path;
    std::vector<SensorFamily> sensors = {SensorFamily::BLE, SensorFamily::GPS};
    std::vector<ModelKind> models = {ModelKind::RF, ModelKind::MLP};
    FlipAssumption assumption = FlipAssumption::OneFlip;
    SweepSpec sweep;
    int draws_per_level = 100;
    double validation_fraction = 0.2;
    std::uint64_t master_seed = kDefaultMasterSeed;
    std::size_t cv_folds = 5;
    EwmaParams ewma;
    // Also log the flipped-label evaluations of the true-trained model and
    // the random baseline ("trueGT/flipGT", "random/flipGT").
    bool log_flip_evaluations = false;
    unsigned threads = 0;  // 0 = hardware concurrency
};

void validate(const RunConfig& config);

// Hyperparameters frozen at the first draw, one entry per
// (sensor, model, label mode).
struct GridLogEntry {
    std::string sensor;
    std::string model;
    std::string label_mode;  // "trueGT" | "flipGT"
    std::string config_summary;
    double cv_mean_auc = 0.0;
};

struct ResultTable {
    std::uint64_t master_seed = 0;
    std::vector<EvalRecord> records;
    std::vector<GridLogEntry> grid_log;
};

// Validation users = max(2, round(fraction * N)), sampled without
// replacement; the rest train. Throws when fewer than 2 users exist or no
// training user would remain.
std::pair<std::vector<int>, std::vector<int>> split_oos(std::span<const int> users,
                                                        double fraction, Rng& rng);

// The full Monte-Carlo experiment: per (lambda, draw) flip labels, split
// out-of-sample by user, train every (sensor, model) on true and flipped
// labels with the hyperparameters frozen at the first draw, and evaluate the
// four settings on the validation users. Deterministic: every cell draws
// from streams derived off (master_seed, level, draw).
ResultTable run_monte_carlo(const Dataset& dataset, const RunConfig& config);
ResultTable run_monte_carlo(const RunConfig& config);  // loads config.dataset_path

// results.csv: sensor,model,setting,lambda,draw,precision,recall,f1,
// accuracy,auc,flip_fraction,flags
void write_results_csv(const ResultTable& table, const std::string& path);
ResultTable read_results_csv(const std::string& path);
void write_run_meta_json(const ResultTable& table, const std::string& path);

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;
    double ci95 = 0.0;  // half width
};

struct CellSummary {
    std::string sensor;
    std::string model;
    std::string setting;
    double lambda = 0.0;
    std::size_t n = 0;         // aggregated draws
    std::size_t excluded = 0;  // flagged single-class evaluations
    MetricStats precision, recall, f1, accuracy, auc;
    double flip_fraction_mean = 0.0;
};

// Blind-evaluation bias: mean AUC(flipGT/flipGT) - mean AUC(flipGT/trueGT).
struct BiasPoint {
    std::string sensor;
    std::string model;
    double lambda = 0.0;
    double bias = 0.0;
    std::size_t draws = 0;
};

struct Summary {
    std::uint64_t master_seed = 0;
    std::vector<CellSummary> cells;
    std::vector<BiasPoint> bias_curve;
    std::vector<std::pair<double, double>> flip_fraction_by_lambda;
};

Summary aggregate_report(const ResultTable& table);
void write_summary_json(const Summary& summary, const std::string& path);
void write_summary_csv(const Summary& summary, const std::string& path);

}  // namespace bibo
