#pragma once

#include <cstddef>
#include <vector>

namespace odstop {

/**
 * ROC AUC with strict inequality: the fraction of (inlier, outlier) pairs
 * where the inlier scores strictly lower than the outlier. Tied pairs
 * contribute nothing, so a constant score vector gives 0. Labels are 0
 * (inlier) / 1 (outlier); both classes must be present.
 *
 * Implemented in O(n log n) over score-sorted tie groups; equals the
 * quadratic pairwise count exactly.
 */
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Average precision over the descending-score ranking, ties broken by
// ascending original index. Requires at least one outlier.
double average_precision(const std::vector<double>& scores, const std::vector<int>& labels);

/**
 * Entropy of the normalised loss distribution: with u_i = v_i / sum(v),
 * H = -sum(u_i * ln u_i). Losses must be finite and strictly positive.
 *
 * Terms are summed in sorted value order, which makes the result invariant
 * under permutations of the input bit-for-bit. Range is [0, ln n], with
 * ln n reached exactly when all losses are equal.
 */
double loss_entropy(const std::vector<double>& losses);

struct LossGap {
    double inlier_mean = 0.0;
    double outlier_mean = 0.0;
    double gap = 0.0;  // outlier_mean - inlier_mean; negative means inverted
};

// Class-conditional mean losses and their gap. Both classes must be present.
LossGap loss_gap(const std::vector<double>& losses, const std::vector<int>& labels);

// Sample Pearson correlation. Throws std::runtime_error when either input
// has zero variance (correlation undefined).
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// True when the curve's total span (max - min) is within the threshold,
// i.e. the metric never really moved over the run.
bool auc_converged(const std::vector<double>& curve, double threshold = 0.05);

// Number of samples sharing a score with at least one other sample.
// Reported alongside AUC since ties carry no ranking information.
std::size_t score_tie_count(const std::vector<double>& scores);

// Per-iteration training curves; index 0 is the pre-training state.
// The label-based sequences (auc, ap, l_in, l_out, l_gap, r_pi) stay empty
// when the dataset is unlabeled.
struct MetricCurves {
    std::vector<double> mean_loss;
    std::vector<double> entropy;
    std::vector<double> auc;
    std::vector<double> ap;
    std::vector<double> l_in;
    std::vector<double> l_out;
    std::vector<double> l_gap;
    std::vector<double> r_pi;

    bool has_labels() const { return !auc.empty(); }
    std::size_t size() const { return entropy.size(); }
    // Throws std::invalid_argument if the populated sequences differ in length.
    void validate() const;
};

}  // namespace odstop
