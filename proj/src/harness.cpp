#include "odstop/harness.hpp"

#include "odstop/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace odstop {

namespace {

OdModel build_model(const TrainConfig& cfg, const Dataset& data) {
    if (cfg.model.kind == ModelKind::autoencoder)
        return OdModel::new_autoencoder(data.dim(), cfg.model.width, cfg.seed);
    return OdModel::new_deep_svdd(data.dim(), cfg.model.width, data.X, cfg.seed);
}

void require_labels(const Dataset& data, const char* who) {
    if (!data.has_labels)
        throw std::invalid_argument(std::string(who) + ": dataset '" + data.name +
                                    "' has no labels");
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions are
// rethrown on the caller thread.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::size_t TrainConfig::resolve_iters(std::size_t n) const {
    if (iters > 0) return iters;
    const std::size_t per_epoch = (n + batch_size - 1) / batch_size;
    return epochs * per_epoch;
}

StopConfig TrainConfig::stop_config(std::size_t n) const {
    StopConfig s;
    s.patience = patience;
    s.downtrend_threshold = downtrend_threshold;
    s.eval_size = eval_size;
    s.max_iters = resolve_iters(n);
    return s;
}

void TrainConfig::validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr))
        throw std::invalid_argument("TrainConfig: bad learning rate");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be positive");
    if (iters == 0 && epochs == 0)
        throw std::invalid_argument("TrainConfig: need iters or epochs");
    if (model.width == 0) throw std::invalid_argument("TrainConfig: model width must be positive");
    if (patience == 0) throw std::invalid_argument("TrainConfig: patience must be positive");
    if (!(downtrend_threshold >= 0.0) || !std::isfinite(downtrend_threshold))
        throw std::invalid_argument("TrainConfig: bad downtrend threshold");
    if (eval_size == 0) throw std::invalid_argument("TrainConfig: eval_size must be positive");
}

TrainingReport run_training(const TrainConfig& cfg, const Dataset& data) {
    cfg.validate();
    if (data.n() == 0) throw std::invalid_argument("run_training: empty dataset");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    TrainingReport rep;
    rep.dataset = data.name;
    rep.n = data.n();
    rep.dim = data.dim();
    rep.has_labels = data.has_labels;
    rep.outlier_ratio = data.has_labels ? data.outlier_ratio : nan;
    rep.config = cfg;
    rep.selected_auc = rep.selected_ap = rep.final_auc = rep.final_ap = nan;
    rep.pearson_r = nan;

    OdModel model = build_model(cfg, data);
    const EvalSet eval = sample_eval_set(data, cfg.eval_size, mix_seed(cfg.seed, 0x45564CULL));

    TrainSettings settings;
    settings.lr = cfg.lr;
    settings.batch_size = cfg.batch_size;
    settings.seed = cfg.seed;
    settings.early_stop = cfg.early_stop;

    MetricCurves curves;
    IterationCallback cb;
    if (cfg.log_curves)
        cb = [&](std::size_t, double e, const OdModel& m) {
            const std::vector<double> s = m.score(data.X);
            double mean = 0.0;
            for (double v : s) mean += v;
            curves.mean_loss.push_back(mean / static_cast<double>(s.size()));
            curves.entropy.push_back(e);
            if (data.has_labels) {
                curves.auc.push_back(auc(s, data.labels));
                curves.ap.push_back(average_precision(s, data.labels));
                const LossGap g = loss_gap(s, data.labels);
                curves.l_in.push_back(g.inlier_mean);
                curves.l_out.push_back(g.outlier_mean);
                curves.l_gap.push_back(g.gap);
                curves.r_pi.push_back(pseudo_inlier_ratio(s, data.labels));
            }
        };

    const StopRunResult run =
        run_with_stop(model, data.X, eval.features, settings, cfg.stop_config(data.n()), cb);

    rep.stop_iter = run.stop_iter;
    rep.best_iter = run.best_iter;
    rep.scores = run.scores;
    rep.timings = run.timings;
    rep.score_tie_count = score_tie_count(run.scores);
    if (cfg.log_curves) {
        curves.validate();
        rep.curves = std::move(curves);
    } else {
        rep.curves.entropy = run.entropy_curve;
    }

    if (data.has_labels) {
        rep.selected_auc = auc(run.scores, data.labels);
        rep.selected_ap = average_precision(run.scores, data.labels);
        if (cfg.log_curves) {
            rep.final_auc = rep.curves.auc.back();
            rep.final_ap = rep.curves.ap.back();
            rep.auc_flat = auc_converged(rep.curves.auc);
            try {
                rep.pearson_r = pearson(rep.curves.auc, rep.curves.entropy);
                rep.pearson_defined = true;
            } catch (const std::runtime_error&) {
                rep.pearson_defined = false;
            }
            rep.diagnostics = classify_run(rep.curves, data.outlier_ratio);
        }
    }
    return rep;
}

VanillaResult run_vanilla(const TrainConfig& cfg, const Dataset& data) {
    cfg.validate();
    if (data.n() == 0) throw std::invalid_argument("run_vanilla: empty dataset");

    OdModel model = build_model(cfg, data);
    Adam opt(model.net(), cfg.lr);
    const std::size_t t_max = cfg.resolve_iters(data.n());

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    std::size_t iter = 0;
    for (std::size_t epoch = 0; iter < t_max; ++epoch) {
        const auto plan = batches(data.n(), cfg.batch_size, cfg.seed, epoch);
        for (const auto& rows : plan) {
            if (iter >= t_max) break;
            ++iter;
            model.train_step(data.X.gather_rows(rows), opt);
        }
    }
    VanillaResult res;
    res.train_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    res.scores = model.score(data.X);
    return res;
}

CompareSummary summarize_compare(std::vector<CompareRow> rows) {
    if (rows.empty()) throw std::invalid_argument("summarize_compare: no rows");
    std::sort(rows.begin(), rows.end(),
              [](const CompareRow& a, const CompareRow& b) { return a.dataset < b.dataset; });

    CompareSummary s;
    const double n = static_cast<double>(rows.size());
    double ratio_sum = 0.0, van_secs = 0.0, stop_secs = 0.0;
    double rank_van = 0.0, rank_stop = 0.0;
    for (const CompareRow& r : rows) {
        s.mean_auc_vanilla += r.vanilla_auc / n;
        s.mean_auc_stopped += r.stopped_auc / n;
        s.mean_ap_vanilla += r.vanilla_ap / n;
        s.mean_ap_stopped += r.stopped_ap / n;
        if (!(r.vanilla_seconds > 0.0))
            throw std::invalid_argument("summarize_compare: non-positive baseline time");
        ratio_sum += r.stopped_seconds / r.vanilla_seconds;
        van_secs += r.vanilla_seconds;
        stop_secs += r.stopped_seconds;
        if (r.vanilla_auc > r.stopped_auc) {
            rank_van += 1.0;
            rank_stop += 2.0;
        } else if (r.stopped_auc > r.vanilla_auc) {
            rank_van += 2.0;
            rank_stop += 1.0;
        } else {
            rank_van += 1.5;
            rank_stop += 1.5;
        }
    }
    s.mean_rank_auc_vanilla = rank_van / n;
    s.mean_rank_auc_stopped = rank_stop / n;
    s.avg_time_vanilla = 1.0;  // each dataset's self-ratio is exactly 1
    s.avg_time_stopped = ratio_sum / n;
    s.total_time_vanilla = van_secs / van_secs;
    s.total_time_stopped = stop_secs / van_secs;
    s.rows = std::move(rows);
    return s;
}

CompareSummary run_compare(const TrainConfig& cfg, const std::vector<Dataset>& datasets,
                           std::size_t jobs) {
    if (datasets.empty()) throw std::invalid_argument("run_compare: no datasets");
    for (const Dataset& d : datasets) require_labels(d, "run_compare");

    std::vector<CompareRow> rows(datasets.size());
    parallel_for(datasets.size(), jobs, [&](std::size_t i) {
        const Dataset& data = datasets[i];
        CompareRow row;
        row.dataset = data.name;
        row.horizon = cfg.resolve_iters(data.n());

        const VanillaResult van = run_vanilla(cfg, data);
        row.vanilla_auc = auc(van.scores, data.labels);
        row.vanilla_ap = average_precision(van.scores, data.labels);
        row.vanilla_seconds = van.train_seconds;

        TrainConfig stopped = cfg;
        stopped.early_stop = true;
        stopped.log_curves = false;  // timing must not include label metrics
        const TrainingReport rep = run_training(stopped, data);
        row.stopped_auc = rep.selected_auc;
        row.stopped_ap = rep.selected_ap;
        row.stopped_seconds = rep.timings.total_seconds;
        row.stop_iter = rep.stop_iter;
        row.best_iter = rep.best_iter;
        rows[i] = std::move(row);
    });
    return summarize_compare(std::move(rows));
}

CorrelateSummary summarize_correlate(std::vector<CorrelateRow> rows) {
    if (rows.empty()) throw std::invalid_argument("summarize_correlate: no rows");
    std::sort(rows.begin(), rows.end(), [](const CorrelateRow& a, const CorrelateRow& b) {
        if (a.defined != b.defined) return a.defined;  // undefined entries last
        if (a.defined && a.r != b.r) return a.r < b.r;
        return a.dataset < b.dataset;
    });
    CorrelateSummary s;
    s.histogram.assign(8, 0);
    for (const CorrelateRow& r : rows) {
        if (!r.defined) continue;
        const int bin = std::min(7, std::max(0, static_cast<int>((r.r + 1.0) / 0.25)));
        ++s.histogram[static_cast<std::size_t>(bin)];
    }
    s.rows = std::move(rows);
    return s;
}

CorrelateSummary run_correlate(const TrainConfig& cfg, const std::vector<Dataset>& datasets,
                               std::size_t jobs) {
    if (datasets.empty()) throw std::invalid_argument("run_correlate: no datasets");
    for (const Dataset& d : datasets) require_labels(d, "run_correlate");

    std::vector<CorrelateRow> rows(datasets.size());
    parallel_for(datasets.size(), jobs, [&](std::size_t i) {
        TrainConfig full = cfg;
        full.early_stop = false;
        full.log_curves = true;
        const TrainingReport rep = run_training(full, datasets[i]);
        CorrelateRow row;
        row.dataset = datasets[i].name;
        row.r = rep.pearson_r;
        row.defined = rep.pearson_defined;
        row.auc_flat = rep.auc_flat;
        rows[i] = std::move(row);
    });
    return summarize_correlate(std::move(rows));
}

}  // namespace odstop
