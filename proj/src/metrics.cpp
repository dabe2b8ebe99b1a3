#include "odstop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace odstop {

namespace {

void check_binary_labels(const std::vector<double>& scores, const std::vector<int>& labels,
                         const char* who) {
    if (scores.size() != labels.size())
        throw std::invalid_argument(std::string(who) + ": scores/labels length mismatch");
    if (scores.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
    for (int l : labels)
        if (l != 0 && l != 1)
            throw std::invalid_argument(std::string(who) + ": labels must be 0 or 1");
    for (double s : scores)
        if (!std::isfinite(s))
            throw std::invalid_argument(std::string(who) + ": non-finite score");
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_binary_labels(scores, labels, "auc");
    std::size_t n_out = 0;
    for (int l : labels) n_out += static_cast<std::size_t>(l);
    const std::size_t n_in = labels.size() - n_out;
    if (n_in == 0 || n_out == 0)
        throw std::invalid_argument("auc: AUC undefined, both classes required");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Walk tie groups in ascending score order; each outlier in a group is
    // strictly above exactly the inliers seen in earlier groups.
    unsigned long long hits = 0;
    std::size_t inliers_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t group_in = 0, group_out = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == 1)
                ++group_out;
            else
                ++group_in;
            ++j;
        }
        hits += static_cast<unsigned long long>(group_out) * inliers_below;
        inliers_below += group_in;
        i = j;
    }
    return static_cast<double>(hits) /
           (static_cast<double>(n_in) * static_cast<double>(n_out));
}

double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_binary_labels(scores, labels, "average_precision");
    std::size_t n_out = 0;
    for (int l : labels) n_out += static_cast<std::size_t>(l);
    if (n_out == 0)
        throw std::invalid_argument("average_precision: undefined without outliers");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (labels[order[k]] != 1) continue;
        ++tp;
        const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
        ap += precision / static_cast<double>(n_out);
    }
    return ap;
}

double loss_entropy(const std::vector<double>& losses) {
    if (losses.empty()) throw std::invalid_argument("loss_entropy: empty input");
    for (double v : losses) {
        if (!std::isfinite(v)) throw std::invalid_argument("loss_entropy: non-finite loss");
        if (v <= 0.0) throw std::invalid_argument("loss_entropy: losses must be positive");
    }
    // Sorted summation: permutations of the input give bit-identical output.
    std::vector<double> v = losses;
    std::sort(v.begin(), v.end());
    double total = 0.0;
    for (double x : v) total += x;

    double h = 0.0;
    double usum = 0.0;
    for (double x : v) {
        const double u = x / total;
        usum += u;
        h -= u * std::log(u);
    }
    if (std::fabs(usum - 1.0) > 1e-12)
        throw std::runtime_error("loss_entropy: normalised losses do not sum to 1");
    return h;
}

LossGap loss_gap(const std::vector<double>& losses, const std::vector<int>& labels) {
    check_binary_labels(losses, labels, "loss_gap");
    double in_sum = 0.0, out_sum = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (labels[i] == 1) {
            out_sum += losses[i];
            ++n_out;
        } else {
            in_sum += losses[i];
            ++n_in;
        }
    }
    if (n_in == 0 || n_out == 0)
        throw std::invalid_argument("loss_gap: both classes required");
    LossGap g;
    g.inlier_mean = in_sum / static_cast<double>(n_in);
    g.outlier_mean = out_sum / static_cast<double>(n_out);
    g.gap = g.outlier_mean - g.inlier_mean;
    return g;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw std::runtime_error("pearson: correlation undefined, zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

bool auc_converged(const std::vector<double>& curve, double threshold) {
    if (curve.empty()) throw std::invalid_argument("auc_converged: empty curve");
    const auto [mn, mx] = std::minmax_element(curve.begin(), curve.end());
    return (*mx - *mn) <= threshold;
}

std::size_t score_tie_count(const std::vector<double>& scores) {
    std::vector<double> v = scores;
    std::sort(v.begin(), v.end());
    std::size_t tied = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if (j - i > 1) tied += j - i;
        i = j;
    }
    return tied;
}

void MetricCurves::validate() const {
    const std::size_t n = entropy.size();
    auto check = [&](const std::vector<double>& v, const char* name) {
        if (!v.empty() && v.size() != n)
            throw std::invalid_argument(std::string("MetricCurves: ") + name +
                                        " length differs from entropy");
    };
    check(mean_loss, "mean_loss");
    check(auc, "auc");
    check(ap, "ap");
    check(l_in, "l_in");
    check(l_out, "l_out");
    check(l_gap, "l_gap");
    check(r_pi, "r_pi");
}

}  // namespace odstop
