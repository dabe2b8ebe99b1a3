#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "odstop/harness.hpp"
#include "odstop/report_io.hpp"

using namespace odstop;

namespace {

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.model.width = 8;
    cfg.batch_size = 1 << 12;  // full batch for these sizes
    cfg.iters = 60;
    cfg.patience = 15;
    cfg.eval_size = 256;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("run_training: labeled synthetic run produces a consistent report") {
    const Dataset data = standardize(gen_synthetic(180, 20, 2, 6.0, 1));
    const TrainConfig cfg = small_config();
    const TrainingReport rep = run_training(cfg, data);

    CHECK(rep.schema_version == 1);
    CHECK(rep.dataset == "synthetic");
    CHECK(rep.n == 200);
    CHECK(rep.dim == 2);
    CHECK(rep.has_labels);
    CHECK(rep.outlier_ratio == doctest::Approx(0.1).epsilon(1e-12));

    const std::size_t len = rep.stop_iter + 1;
    CHECK(rep.curves.size() == len);
    CHECK(rep.curves.mean_loss.size() == len);
    CHECK(rep.curves.auc.size() == len);
    CHECK(rep.curves.ap.size() == len);
    CHECK(rep.curves.l_gap.size() == len);
    CHECK(rep.curves.r_pi.size() == len);
    CHECK(rep.best_iter <= rep.stop_iter);
    REQUIRE(rep.scores.size() == 200);

    // the restored scores must reproduce the curve entry at best_iter
    CHECK(std::fabs(rep.selected_auc - rep.curves.auc[rep.best_iter]) <= 1e-12);
    CHECK(std::fabs(rep.selected_ap - rep.curves.ap[rep.best_iter]) <= 1e-12);
    CHECK(rep.final_auc == rep.curves.auc.back());

    // mean loss decomposes into the class-conditional means at every iteration
    for (std::size_t i = 0; i < len; ++i) {
        const double recombined = rep.outlier_ratio * rep.curves.l_out[i] +
                                  (1.0 - rep.outlier_ratio) * rep.curves.l_in[i];
        CHECK(std::fabs(rep.curves.mean_loss[i] - recombined) <= 1e-9);
    }

    REQUIRE(rep.diagnostics.has_value());
    CHECK(rep.diagnostics->decomposition_residual <= 1e-9);
    CHECK(rep.timings.train_seconds + rep.timings.eval_seconds <=
          rep.timings.total_seconds * 1.05);
}

TEST_CASE("run_training: unlabeled data yields entropy and loss curves only") {
    Dataset data = standardize(gen_synthetic(90, 10, 3, 5.0, 2));
    data.labels.clear();
    data.has_labels = false;
    const TrainConfig cfg = small_config();
    const TrainingReport rep = run_training(cfg, data);

    CHECK_FALSE(rep.has_labels);
    CHECK(rep.curves.auc.empty());
    CHECK(rep.curves.r_pi.empty());
    CHECK(rep.curves.entropy.size() == rep.stop_iter + 1);
    CHECK(rep.curves.mean_loss.size() == rep.stop_iter + 1);
    CHECK(std::isnan(rep.selected_auc));
    CHECK(std::isnan(rep.final_ap));
    CHECK_FALSE(rep.diagnostics.has_value());
    CHECK_FALSE(rep.pearson_defined);

    const std::string csv = curves_csv(rep.curves);
    CHECK(csv.rfind("iter,mean_loss,entropy,auc,ap,l_gap,r_pi\n", 0) == 0);
    const std::size_t first_row = csv.find('\n') + 1;
    const std::string row = csv.substr(first_row, csv.find('\n', first_row) - first_row);
    CHECK(row.substr(row.size() - 4) == ",,,,");  // label columns stay blank
}

TEST_CASE("run_training: fixed config and seed reproduce identical bytes") {
    const Dataset data = standardize(gen_synthetic(120, 12, 2, 6.0, 5));
    const TrainConfig cfg = small_config();
    const TrainingReport a = run_training(cfg, data);
    const TrainingReport b = run_training(cfg, data);
    CHECK(curves_csv(a.curves) == curves_csv(b.curves));
    CHECK(a.scores == b.scores);
    CHECK(a.stop_iter == b.stop_iter);
    CHECK(a.best_iter == b.best_iter);
}

TEST_CASE("report json: full round trip") {
    const Dataset data = standardize(gen_synthetic(100, 10, 2, 6.0, 3));
    TrainConfig cfg = small_config();
    cfg.model.kind = ModelKind::linear_deep_svdd;
    cfg.model.width = 4;
    const TrainingReport rep = run_training(cfg, data);

    const TrainingReport back = parse_report_json(report_json(rep));
    CHECK(back.schema_version == rep.schema_version);
    CHECK(back.dataset == rep.dataset);
    CHECK(back.n == rep.n);
    CHECK(back.config.model.kind == rep.config.model.kind);
    CHECK(back.config.lr == rep.config.lr);
    CHECK(back.stop_iter == rep.stop_iter);
    CHECK(back.best_iter == rep.best_iter);
    CHECK(back.curves.entropy == rep.curves.entropy);
    CHECK(back.curves.auc == rep.curves.auc);
    CHECK(back.curves.l_in == rep.curves.l_in);
    CHECK(back.pearson_defined == rep.pearson_defined);
    if (rep.pearson_defined) CHECK(back.pearson_r == rep.pearson_r);
    REQUIRE(back.diagnostics.has_value());
    CHECK(back.diagnostics->label_misleading == rep.diagnostics->label_misleading);
    CHECK(back.diagnostics->rpi_curve == rep.diagnostics->rpi_curve);

    CHECK_THROWS_AS(parse_report_json("{\"schema_version\": 2}"), std::runtime_error);
}

TEST_CASE("summarize_compare: ratio and rank arithmetic") {
    CompareRow a;
    a.dataset = "b_second";
    a.vanilla_auc = 0.8;
    a.stopped_auc = 0.9;
    a.vanilla_ap = 0.4;
    a.stopped_ap = 0.5;
    a.vanilla_seconds = 10.0;
    a.stopped_seconds = 1.0;  // ratio 0.1
    CompareRow b;
    b.dataset = "a_first";
    b.vanilla_auc = 0.7;
    b.stopped_auc = 0.6;
    b.vanilla_ap = 0.3;
    b.stopped_ap = 0.2;
    b.vanilla_seconds = 5.0;
    b.stopped_seconds = 1.0;  // ratio 0.2

    const CompareSummary s = summarize_compare({a, b});
    REQUIRE(s.rows.size() == 2);
    CHECK(s.rows[0].dataset == "a_first");  // merged in name order
    CHECK(s.mean_auc_vanilla == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.mean_auc_stopped == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.avg_time_vanilla == 1.0);
    CHECK(s.total_time_vanilla == 1.0);
    CHECK(s.avg_time_stopped == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(s.total_time_stopped == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
    CHECK(s.mean_rank_auc_vanilla == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(s.mean_rank_auc_stopped == doctest::Approx(1.5).epsilon(1e-12));

    CHECK_THROWS_AS(summarize_compare({}), std::invalid_argument);
    CompareRow bad = a;
    bad.vanilla_seconds = 0.0;
    CHECK_THROWS_AS(summarize_compare({bad}), std::invalid_argument);
}

TEST_CASE("summarize_correlate: ordering and histogram") {
    CorrelateRow a{"a", -0.9, true, false};
    CorrelateRow b{"b", 0.3, true, false};
    CorrelateRow c{"c", 0.0, false, true};
    CorrelateRow d{"d", -0.2, true, false};
    const CorrelateSummary s = summarize_correlate({a, b, c, d});
    REQUIRE(s.rows.size() == 4);
    CHECK(s.rows[0].r == -0.9);
    CHECK(s.rows[1].r == -0.2);
    CHECK(s.rows[2].r == 0.3);
    CHECK_FALSE(s.rows[3].defined);
    REQUIRE(s.histogram.size() == 8);
    CHECK(s.histogram[0] == 1);  // [-1, -0.75)
    CHECK(s.histogram[3] == 1);  // [-0.25, 0)
    CHECK(s.histogram[5] == 1);  // [0.25, 0.5)
}

TEST_CASE("run_compare: two tiny datasets, concurrency changes nothing") {
    Dataset d1 = standardize(gen_synthetic(100, 10, 2, 6.0, 1));
    d1.name = "alpha";
    Dataset d2 = standardize(gen_synthetic(110, 12, 2, 6.0, 2));
    d2.name = "beta";
    TrainConfig cfg = small_config();
    cfg.iters = 40;
    cfg.patience = 10;

    const CompareSummary serial = run_compare(cfg, {d1, d2}, 1);
    const CompareSummary parallel = run_compare(cfg, {d2, d1}, 2);
    REQUIRE(serial.rows.size() == 2);
    CHECK(serial.rows[0].dataset == "alpha");
    CHECK(parallel.rows[0].dataset == "alpha");
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(serial.rows[i].vanilla_auc == parallel.rows[i].vanilla_auc);
        CHECK(serial.rows[i].stopped_auc == parallel.rows[i].stopped_auc);
        CHECK(serial.rows[i].stop_iter == parallel.rows[i].stop_iter);
        CHECK(serial.rows[i].vanilla_seconds > 0.0);
        CHECK(serial.rows[i].stopped_seconds > 0.0);
        CHECK(serial.rows[i].horizon == 40);
    }

    Dataset unlabeled = d1;
    unlabeled.has_labels = false;
    unlabeled.labels.clear();
    CHECK_THROWS_AS(run_compare(cfg, {unlabeled}, 1), std::invalid_argument);
}

TEST_CASE("run_correlate: smoke on one dataset") {
    Dataset d = standardize(gen_synthetic(150, 15, 2, 6.0, 4));
    TrainConfig cfg = small_config();
    cfg.iters = 50;
    const CorrelateSummary s = run_correlate(cfg, {d}, 1);
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].dataset == "synthetic");
    // either a defined coefficient or an explicitly undefined entry
    if (!s.rows[0].defined) CHECK(s.histogram == std::vector<std::size_t>(8, 0));
}

TEST_CASE("config validation and iteration resolution") {
    TrainConfig cfg = small_config();
    cfg.iters = 0;
    cfg.epochs = 3;
    cfg.batch_size = 32;
    CHECK(cfg.resolve_iters(100) == 12);  // ceil(100/32) = 4 batches per epoch
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.batch_size = 32;
    cfg.lr = -1.0;  // zero is allowed (frozen optimiser), negative is not
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.lr = 1e-3;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
