#pragma once

#include <cstddef>
#include <vector>

#include "odstop/matrix.hpp"
#include "odstop/metrics.hpp"
#include "odstop/od_model.hpp"

namespace odstop {

/**
 * Ratio of inliers scoring above the outlier-mean loss to the number of
 * outliers (strictly above; equality does not count). Values >= 1 mean the
 * nominal inlier class contains at least as many high-loss points as there
 * are labeled outliers, a hint that the ground-truth labels disagree with
 * the low-density-is-normal assumption. Needs both classes.
 */
double pseudo_inlier_ratio(const std::vector<double>& losses, const std::vector<int>& labels);

// Core arithmetic of the gradient alignment: projects each per-sample
// gradient onto the direction of the mean gradient. Throws
// std::runtime_error when the mean gradient norm is below 1e-12.
std::vector<double> gradient_alignment(const std::vector<std::vector<double>>& per_sample_grads);

// Alignment of each batch sample's loss gradient with the mean batch
// gradient: delta_i = <g_i, g_mean> / |g_mean|. The mean of the deltas
// equals |g_mean| up to floating-point error.
std::vector<double> gradient_alignment(const OdModel& model, const Matrix& batch);

struct DiagnosticThresholds {
    double rpi_high = 1.0;       // final R_pi at or above this is suspicious
    double combined_mass = 0.5;  // alpha * (1 + R_pi) at or above this is suspicious
    double auc_span = 0.05;      // AUC span within this counts as converged
};

struct DiagnosticReport {
    double rpi_final = 0.0;
    std::vector<double> rpi_curve;
    bool label_misleading = false;
    bool auc_converged = false;
    double decomposition_residual = 0.0;  // worst |mean loss - class-weighted mean|
};

/**
 * Post-hoc classification of a finished training run from its logged curves
 * (labels required). A run is flagged label_misleading when the
 * pseudo-inlier ratio ends at or above rpi_high without decreasing over the
 * last half of training, or when the combined high-loss mass
 * alpha * (1 + final R_pi) reaches combined_mass. auc_converged flags runs
 * whose AUC curve never moved more than auc_span. The decomposition
 * residual cross-checks mean loss against the class-conditional means at
 * every logged iteration.
 */
DiagnosticReport classify_run(const MetricCurves& curves, double outlier_ratio,
                              const DiagnosticThresholds& thresholds = {});

}  // namespace odstop
