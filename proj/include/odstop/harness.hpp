#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odstop/data_io.hpp"
#include "odstop/diagnostics.hpp"
#include "odstop/entropy_stop.hpp"
#include "odstop/metrics.hpp"
#include "odstop/od_model.hpp"

namespace odstop {

struct ModelConfig {
    ModelKind kind = ModelKind::autoencoder;
    std::size_t width = 64;  // hidden width (autoencoder) or latent width (svdd)
};

// Full configuration of one training run. When iters == 0 the horizon is
// epochs * ceil(n / batch_size), resolved per dataset.
struct TrainConfig {
    ModelConfig model;
    double lr = 1e-3;
    std::size_t batch_size = 1024;
    std::size_t iters = 0;
    std::size_t epochs = 250;
    std::uint64_t seed = 0;
    std::size_t patience = 100;
    double downtrend_threshold = 0.1;
    std::size_t eval_size = 1024;
    bool early_stop = true;
    bool log_curves = true;  // per-iteration scoring of the full dataset

    std::size_t resolve_iters(std::size_t n) const;
    StopConfig stop_config(std::size_t n) const;
    void validate() const;
};

struct TrainingReport {
    int schema_version = 1;
    std::string dataset;
    std::size_t n = 0, dim = 0;
    bool has_labels = false;
    double outlier_ratio = 0.0;
    TrainConfig config;

    MetricCurves curves;  // empty when log_curves is off
    std::size_t stop_iter = 0;
    std::size_t best_iter = 0;
    std::vector<double> scores;  // over all data, best state restored

    // Label-based summary (NaN when unlabeled).
    double selected_auc = 0.0, selected_ap = 0.0;  // at best_iter
    double final_auc = 0.0, final_ap = 0.0;        // at the last logged iteration
    double pearson_r = 0.0;                        // AUC curve vs entropy curve
    bool pearson_defined = false;
    bool auc_flat = false;  // AUC span within 0.05, correlation meaningless
    std::size_t score_tie_count = 0;

    RunTimings timings;
    std::optional<DiagnosticReport> diagnostics;
};

// Trains on the (already standardized) dataset and assembles the full
// report. Labels never reach the training or stopping path; they only feed
// the logged metrics and diagnostics.
TrainingReport run_training(const TrainConfig& cfg, const Dataset& data);

// Full-horizon baseline without entropy evaluation or stopping: the cost
// reference for the early-stopping comparison. Returns the trained model's
// scores and the pure training wall time.
struct VanillaResult {
    std::vector<double> scores;
    double train_seconds = 0.0;
};
VanillaResult run_vanilla(const TrainConfig& cfg, const Dataset& data);

// One row of the model-vs-baseline comparison.
struct CompareRow {
    std::string dataset;
    double vanilla_auc = 0.0, vanilla_ap = 0.0;
    double stopped_auc = 0.0, stopped_ap = 0.0;
    double vanilla_seconds = 0.0, stopped_seconds = 0.0;
    std::size_t stop_iter = 0, best_iter = 0, horizon = 0;
};

struct CompareSummary {
    std::vector<CompareRow> rows;  // sorted by dataset name
    double mean_auc_vanilla = 0.0, mean_auc_stopped = 0.0;
    double mean_ap_vanilla = 0.0, mean_ap_stopped = 0.0;
    double mean_rank_auc_vanilla = 0.0, mean_rank_auc_stopped = 0.0;
    // Time ratios against the vanilla baseline; the baseline's own entries
    // are exactly 1 by construction.
    double avg_time_vanilla = 1.0, avg_time_stopped = 0.0;    // mean of per-dataset ratios
    double total_time_vanilla = 1.0, total_time_stopped = 0.0;  // ratio of summed seconds
};

// Pure aggregation over precomputed rows (unit-testable arithmetic).
CompareSummary summarize_compare(std::vector<CompareRow> rows);

// Runs baseline and early-stopped training on every dataset (labels
// required) and aggregates. `jobs` > 1 processes datasets concurrently;
// results are merged in dataset-name order either way.
CompareSummary run_compare(const TrainConfig& cfg, const std::vector<Dataset>& datasets,
                           std::size_t jobs = 1);

struct CorrelateRow {
    std::string dataset;
    double r = 0.0;
    bool defined = false;
    bool auc_flat = false;  // AUC curve span within 0.05
};

struct CorrelateSummary {
    std::vector<CorrelateRow> rows;     // sorted ascending by r, undefined last
    std::vector<std::size_t> histogram;  // counts of defined r in [-1,1), 8 bins of 0.25
};

CorrelateSummary summarize_correlate(std::vector<CorrelateRow> rows);

// Full-horizon runs with per-iteration AUC logging; reports the correlation
// between the AUC and entropy curves per dataset (labels required).
CorrelateSummary run_correlate(const TrainConfig& cfg, const std::vector<Dataset>& datasets,
                               std::size_t jobs = 1);

}  // namespace odstop
