#pragma once

// Shared test oracles. These deliberately re-derive results through the
// slowest, most literal route available (pairwise counting, central
// differences, a line-by-line re-transcription of the stop rule) so the
// production implementations are checked against independent code.

#include <cmath>
#include <cstdint>
#include <vector>

#include "odstop/matrix.hpp"
#include "odstop/nn.hpp"
#include "odstop/rng.hpp"

namespace testutil {

// Quadratic reference AUC: strict pairwise count over inlier/outlier pairs.
inline double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
    unsigned long long hits = 0, pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 0) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 1) continue;
            ++pairs;
            if (scores[i] < scores[j]) ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(pairs);
}

inline double mean_loss_forward(const odstop::DenseNet& net, const odstop::Matrix& X,
                                const odstop::PerSampleLoss& loss) {
    const odstop::Matrix y = net.forward(X);
    double s = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r)
        s += loss.value(y.row(r), X.row(r), y.cols, X.cols);
    return s / static_cast<double>(X.rows);
}

// Central-difference gradient of the mean loss for every parameter.
// Returns the worst relative error against the analytic gradient, where the
// relative error uses max(1, |analytic|, |numeric|) as denominator.
inline double max_gradient_rel_error(odstop::DenseNet& net, const odstop::Matrix& X,
                                     const odstop::PerSampleLoss& loss, double h = 1e-5) {
    const std::vector<double> analytic = odstop::flat_gradient(net, X, loss);
    double worst = 0.0;
    std::size_t k = 0;
    auto probe = [&](double& p) {
        const double saved = p;
        p = saved + h;
        const double up = mean_loss_forward(net, X, loss);
        p = saved - h;
        const double down = mean_loss_forward(net, X, loss);
        p = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[k++];
        const double denom = std::max(1.0, std::max(std::fabs(a), std::fabs(numeric)));
        worst = std::max(worst, std::fabs(a - numeric) / denom);
    };
    for (auto& layer : net.layers()) {
        for (double& w : layer.weight.data) probe(w);
        for (double& b : layer.bias) probe(b);
    }
    return worst;
}

// Independent transcription of the entropy-minimum acceptance rule.
// Decisions: 'b' new best, 'w' waiting, 'h' halt.
struct RefStopRule {
    double e_min;
    double prev;
    double variation = 0.0;
    std::size_t patience = 0;
    std::size_t best_iter = 0;
    std::size_t k;
    double r_down;
    bool done = false;

    RefStopRule(double e0, std::size_t k_, double r_down_)
        : e_min(e0), prev(e0), k(k_), r_down(r_down_) {}

    char feed(double e, std::size_t iter) {
        variation += std::fabs(e - prev);
        prev = e;
        bool accept = false;
        if (e < e_min && variation > 0.0)
            accept = (e_min - e) / variation > r_down;
        if (accept) {
            e_min = e;
            variation = 0.0;
            patience = 0;
            best_iter = iter;
            return 'b';
        }
        ++patience;
        if (patience == k) {
            done = true;
            return 'h';
        }
        return 'w';
    }
};

// Random entropy-like curve: positive, mixes downward drifts, plateaus and
// noise so all acceptance branches get exercised.
inline std::vector<double> random_entropy_curve(odstop::Rng& rng, std::size_t len) {
    std::vector<double> curve;
    curve.reserve(len);
    double level = rng.uniform(1.0, 3.0);
    for (std::size_t i = 0; i < len; ++i) {
        const double mode = rng.uniform();
        if (mode < 0.4)
            level -= rng.uniform(0.0, 0.2);  // downtrend
        else if (mode < 0.7)
            level += rng.uniform(-0.02, 0.02);  // plateau jitter
        else
            level += rng.uniform(0.0, 0.15);  // rebound
        if (mode < 0.75 && rng.uniform() < 0.1) level = curve.empty() ? level : curve.back();
        curve.push_back(std::max(0.01, level));
    }
    return curve;
}

}  // namespace testutil
