#include "odstop/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace odstop {

double pseudo_inlier_ratio(const std::vector<double>& losses, const std::vector<int>& labels) {
    if (losses.size() != labels.size())
        throw std::invalid_argument("pseudo_inlier_ratio: length mismatch");
    if (losses.empty()) throw std::invalid_argument("pseudo_inlier_ratio: empty input");
    const LossGap g = loss_gap(losses, labels);  // validates labels and class presence
    std::size_t n_out = 0, above = 0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (labels[i] == 1)
            ++n_out;
        else if (losses[i] > g.outlier_mean)
            ++above;
    }
    return static_cast<double>(above) / static_cast<double>(n_out);
}

std::vector<double> gradient_alignment(const std::vector<std::vector<double>>& per_sample_grads) {
    if (per_sample_grads.empty())
        throw std::invalid_argument("gradient_alignment: empty batch");
    const std::size_t dim = per_sample_grads.front().size();
    for (const auto& g : per_sample_grads)
        if (g.size() != dim)
            throw std::invalid_argument("gradient_alignment: inconsistent gradient sizes");

    std::vector<double> mean(dim, 0.0);
    for (const auto& g : per_sample_grads)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += g[j];
    const double inv_n = 1.0 / static_cast<double>(per_sample_grads.size());
    for (double& m : mean) m *= inv_n;

    double norm_sq = 0.0;
    for (double m : mean) norm_sq += m * m;
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12)
        throw std::runtime_error("gradient_alignment: mean gradient vanishes, direction undefined");

    std::vector<double> out;
    out.reserve(per_sample_grads.size());
    for (const auto& g : per_sample_grads) {
        double dot = 0.0;
        for (std::size_t j = 0; j < dim; ++j) dot += g[j] * mean[j];
        out.push_back(dot / norm);
    }
    return out;
}

std::vector<double> gradient_alignment(const OdModel& model, const Matrix& batch) {
    if (batch.rows == 0) throw std::invalid_argument("gradient_alignment: empty batch");
    std::vector<std::vector<double>> grads;
    grads.reserve(batch.rows);
    Matrix one(1, batch.cols);
    for (std::size_t r = 0; r < batch.rows; ++r) {
        for (std::size_t c = 0; c < batch.cols; ++c) one(0, c) = batch(r, c);
        grads.push_back(flat_gradient(model.net(), one, model.loss()));
    }
    return gradient_alignment(grads);
}

DiagnosticReport classify_run(const MetricCurves& curves, double outlier_ratio,
                              const DiagnosticThresholds& thresholds) {
    curves.validate();
    if (curves.size() == 0) throw std::invalid_argument("classify_run: empty curves");
    if (!curves.has_labels() || curves.r_pi.empty())
        throw std::invalid_argument("classify_run: diagnostics require label-based curves");
    if (!(outlier_ratio > 0.0) || !(outlier_ratio < 1.0))
        throw std::invalid_argument("classify_run: outlier_ratio must be in (0, 1)");

    DiagnosticReport rep;
    rep.rpi_curve = curves.r_pi;
    rep.rpi_final = curves.r_pi.back();

    // Non-decreasing over the last half of the run (every consecutive step).
    bool non_decreasing = true;
    for (std::size_t i = curves.r_pi.size() / 2; i + 1 < curves.r_pi.size(); ++i)
        if (curves.r_pi[i + 1] < curves.r_pi[i]) {
            non_decreasing = false;
            break;
        }

    const bool persistent_high = rep.rpi_final >= thresholds.rpi_high && non_decreasing;
    const bool heavy_mass =
        outlier_ratio * (1.0 + rep.rpi_final) >= thresholds.combined_mass;
    rep.label_misleading = persistent_high || heavy_mass;
    rep.auc_converged = auc_converged(curves.auc, thresholds.auc_span);

    double worst = 0.0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const double recombined = outlier_ratio * curves.l_out[i] +
                                  (1.0 - outlier_ratio) * curves.l_in[i];
        worst = std::max(worst, std::fabs(curves.mean_loss[i] - recombined));
    }
    rep.decomposition_residual = worst;
    return rep;
}

}  // namespace odstop
