#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "odstop/metrics.hpp"
#include "odstop/rng.hpp"
#include "test_util.hpp"

using namespace odstop;

TEST_CASE("auc: hand-computed cases") {
    CHECK(auc({0.2, 0.9, 0.5, 0.7}, {1, 0, 0, 1}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(auc({0.1, 0.2, 0.9, 0.8}, {0, 0, 1, 1}) == 1.0);
    CHECK(auc({0.9, 0.8, 0.1, 0.2}, {0, 0, 1, 1}) == 0.0);
}

TEST_CASE("auc: ties contribute nothing") {
    CHECK(auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.0);
    // one tied pair out of two: (0.3 in) < (0.5 out) counts, (0.5, 0.5) does not
    CHECK(auc({0.3, 0.5, 0.5}, {0, 0, 1}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("auc: single class and bad input rejected") {
    CHECK_THROWS_AS(auc({0.1, 0.2}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(auc({0.1}, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(auc({0.1, 0.2}, {0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(auc({}, {}), std::invalid_argument);
}

TEST_CASE("auc: equals the pairwise count on random tie-bearing data") {
    Rng rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 5 + rng.below(80);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            // coarse grid of values so ties are frequent
            scores[i] = static_cast<double>(rng.below(8)) / 4.0;
            labels[i] = static_cast<int>(rng.below(2));
            (labels[i] ? has1 : has0) = true;
        }
        if (!has0 || !has1) continue;
        CHECK(auc(scores, labels) == testutil::auc_pairwise(scores, labels));
    }
}

TEST_CASE("auc: complement symmetry") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 10 + rng.below(50);
        std::vector<double> scores(n);
        std::vector<int> labels(n), flipped(n);
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.uniform();  // ties have probability ~0
            labels[i] = static_cast<int>(rng.below(2));
            flipped[i] = 1 - labels[i];
            (labels[i] ? has1 : has0) = true;
        }
        if (!has0 || !has1) continue;
        std::vector<double> negated(n);
        for (std::size_t i = 0; i < n; ++i) negated[i] = -scores[i];
        CHECK(auc(negated, flipped) == auc(scores, labels));
    }
}

TEST_CASE("average_precision: hand-computed cases") {
    CHECK(average_precision({0.9, 0.1}, {0, 1}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(average_precision({0.9, 0.1}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(average_precision({0.9, 0.8, 0.1}, {1, 1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    // positives at ranks 1 and 3: (1/1 + 2/3) / 2
    CHECK(average_precision({0.9, 0.8, 0.7}, {1, 0, 1}) ==
          doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("average_precision: ties broken by ascending original index") {
    // Equal scores: index 0 is ranked first. With the positive at index 0
    // AP is 1, with it at index 1 the first rank is a miss.
    CHECK(average_precision({0.5, 0.5}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(average_precision({0.5, 0.5}, {0, 1}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("average_precision: needs at least one outlier, stays in (0,1]") {
    CHECK_THROWS_AS(average_precision({0.1, 0.2}, {0, 0}), std::invalid_argument);
    Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 5 + rng.below(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.uniform();
            labels[i] = static_cast<int>(rng.below(2));
            if (labels[i]) has1 = true;
        }
        if (!has1) labels[0] = 1;
        const double ap = average_precision(scores, labels);
        CHECK(ap > 0.0);
        CHECK(ap <= 1.0);
    }
}

TEST_CASE("loss_entropy: known values") {
    CHECK(std::fabs(loss_entropy({1.0, 1.0, 1.0, 1.0}) - std::log(4.0)) <= 1e-12);
    CHECK(loss_entropy({1.0, 3.0}) == doctest::Approx(0.5623351446188083).epsilon(1e-9));
    CHECK(loss_entropy({5.0}) == 0.0);
}

TEST_CASE("loss_entropy: domain errors") {
    CHECK_THROWS_AS(loss_entropy({}), std::invalid_argument);
    CHECK_THROWS_AS(loss_entropy({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(loss_entropy({1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(loss_entropy({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("loss_entropy: scale invariance") {
    Rng rng(17);
    const double factors[] = {1e-6, 0.5, 3.0, 1e3, 1e6};
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 2 + rng.below(60);
        std::vector<double> v(n), scaled(n);
        for (double& x : v) x = rng.uniform(1e-6, 10.0);
        const double h = loss_entropy(v);
        for (double c : factors) {
            for (std::size_t i = 0; i < n; ++i) scaled[i] = c * v[i];
            CHECK(std::fabs(loss_entropy(scaled) - h) <= 1e-9);
        }
    }
}

TEST_CASE("loss_entropy: permutation invariance is exact") {
    Rng rng(19);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.below(40);
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(1e-3, 5.0);
        const double h = loss_entropy(v);
        std::vector<double> p = v;
        rng.shuffle(p);
        CHECK(loss_entropy(p) == h);
        std::reverse(p.begin(), p.end());
        CHECK(loss_entropy(p) == h);
    }
}

TEST_CASE("loss_entropy: bounds, maximum only at uniform") {
    Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.below(40);
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(1e-3, 5.0);
        const double h = loss_entropy(v);
        CHECK(h >= 0.0);
        CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
    }
    CHECK(std::fabs(loss_entropy(std::vector<double>(7, 0.3)) - std::log(7.0)) <= 1e-12);
}

TEST_CASE("loss_gap: hand-computed case and inversion") {
    const LossGap g = loss_gap({1.0, 2.0, 4.0, 6.0}, {0, 0, 1, 1});
    CHECK(g.inlier_mean == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(g.outlier_mean == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(g.gap == doctest::Approx(3.5).epsilon(1e-12));

    const LossGap inv = loss_gap({4.0, 6.0, 1.0, 2.0}, {0, 0, 1, 1});
    CHECK(inv.gap == doctest::Approx(-3.5).epsilon(1e-12));

    CHECK_THROWS_AS(loss_gap({1.0, 2.0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("loss_gap: class means recombine to the overall mean") {
    Rng rng(29);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 4 + rng.below(200);
        std::vector<double> v(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = rng.uniform(0.0, 10.0);
            labels[i] = static_cast<int>(rng.below(2));
        }
        labels[0] = 0;
        labels[1] = 1;
        double n_out = 0.0;
        for (int l : labels) n_out += l;
        const double alpha = n_out / static_cast<double>(n);
        const LossGap g = loss_gap(v, labels);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(n);
        CHECK(std::fabs(mean - (alpha * g.outlier_mean + (1.0 - alpha) * g.inlier_mean)) <= 1e-9);
    }
}

TEST_CASE("pearson: perfect correlations and undefined input") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> up, down;
    for (double v : x) {
        up.push_back(2.0 * v + 1.0);
        down.push_back(-0.5 * v + 3.0);
    }
    CHECK(pearson(x, up) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(x, down) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(pearson(x, {1.0, 1.0, 1.0, 1.0}), std::runtime_error);
    CHECK_THROWS_AS(pearson({1.0}, {2.0}), std::invalid_argument);
}

TEST_CASE("auc_converged: span against threshold") {
    CHECK(auc_converged({0.70, 0.72, 0.71, 0.74}));
    CHECK_FALSE(auc_converged({0.5, 0.7, 0.65}));
    CHECK(auc_converged({0.5, 0.7}, 0.2));
    CHECK_THROWS_AS(auc_converged({}), std::invalid_argument);
}

TEST_CASE("score_tie_count") {
    CHECK(score_tie_count({1.0, 2.0, 3.0}) == 0);
    CHECK(score_tie_count({1.0, 2.0, 2.0, 3.0}) == 2);
    CHECK(score_tie_count({2.0, 2.0, 2.0}) == 3);
}

TEST_CASE("MetricCurves::validate rejects ragged sequences") {
    MetricCurves c;
    c.entropy = {1.0, 0.9};
    c.mean_loss = {0.5, 0.4};
    CHECK_NOTHROW(c.validate());
    c.auc = {0.7};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
