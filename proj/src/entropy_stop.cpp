#include "odstop/entropy_stop.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "odstop/data_io.hpp"
#include "odstop/metrics.hpp"

namespace odstop {

void StopConfig::validate() const {
    if (patience == 0) throw std::invalid_argument("StopConfig: patience must be positive");
    if (!(downtrend_threshold >= 0.0) || !std::isfinite(downtrend_threshold))
        throw std::invalid_argument("StopConfig: downtrend_threshold must be >= 0");
    if (eval_size == 0) throw std::invalid_argument("StopConfig: eval_size must be positive");
}

StopTracker::StopTracker(const StopConfig& cfg, double e0, ParamSnapshot initial)
    : cfg_(cfg), min_entropy_(e0), prev_entropy_(e0), best_(std::move(initial)) {
    cfg_.validate();
    if (!std::isfinite(e0))
        throw std::invalid_argument("StopTracker: non-finite initial entropy");
    best_.iteration = 0;
}

StopDecision StopTracker::observe(double entropy, std::size_t iter,
                                  const std::function<ParamSnapshot()>& take_snapshot) {
    if (halted_) throw std::logic_error("StopTracker::observe: already halted");
    if (iter != next_iter_)
        throw std::logic_error("StopTracker::observe: expected iteration " +
                               std::to_string(next_iter_) + ", got " + std::to_string(iter));
    if (!std::isfinite(entropy))
        throw std::invalid_argument("StopTracker::observe: non-finite entropy at iteration " +
                                    std::to_string(iter));
    ++next_iter_;

    variation_ += std::fabs(entropy - prev_entropy_);
    prev_entropy_ = entropy;

    // Accept only a genuine downtrend: the drop below the current minimum
    // must exceed the threshold share of the variation accumulated since the
    // last acceptance. A zero-variation step can never be accepted.
    const bool accepted = entropy < min_entropy_ && variation_ > 0.0 &&
                          (min_entropy_ - entropy) / variation_ > cfg_.downtrend_threshold;
    if (accepted) {
        min_entropy_ = entropy;
        variation_ = 0.0;
        patience_count_ = 0;
        best_ = take_snapshot();
        best_.iteration = iter;
        return StopDecision::new_best;
    }
    ++patience_count_;
    if (patience_count_ == cfg_.patience) {
        halted_ = true;
        return StopDecision::halt;
    }
    return StopDecision::waiting;
}

StopRunResult run_stop_loop(const TrainLoopHooks& hooks, std::size_t n_rows,
                            const TrainSettings& settings, const StopConfig& cfg) {
    cfg.validate();
    if (n_rows == 0) throw std::invalid_argument("run_stop_loop: empty training set");
    if (settings.batch_size == 0)
        throw std::invalid_argument("run_stop_loop: batch_size must be positive");
    if (!(settings.lr >= 0.0) || !std::isfinite(settings.lr))
        throw std::invalid_argument("run_stop_loop: bad learning rate");

    using clock = std::chrono::steady_clock;
    const auto wall_start = clock::now();
    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    StopRunResult res;
    double train_s = 0.0, eval_s = 0.0;

    auto eval_entropy = [&]() {
        const auto t0 = clock::now();
        const double e = loss_entropy(hooks.eval_losses());
        eval_s += seconds_since(t0);
        return e;
    };

    const double e0 = eval_entropy();
    res.entropy_curve.push_back(e0);
    StopTracker tracker(cfg, e0, hooks.take_snapshot(0));
    if (hooks.on_iteration) hooks.on_iteration(0, e0);

    std::size_t iter = 0;
    bool halted = false;
    for (std::size_t epoch = 0; iter < cfg.max_iters && !halted; ++epoch) {
        const auto plan = batches(n_rows, settings.batch_size, settings.seed, epoch);
        for (const auto& rows : plan) {
            if (iter >= cfg.max_iters) break;
            ++iter;
            {
                const auto t0 = clock::now();
                hooks.train_step(rows);
                train_s += seconds_since(t0);
            }
            const double e = eval_entropy();
            res.entropy_curve.push_back(e);
            if (hooks.on_iteration) hooks.on_iteration(iter, e);
            if (settings.early_stop) {
                const StopDecision d =
                    tracker.observe(e, iter, [&] { return hooks.take_snapshot(iter); });
                if (d == StopDecision::halt) {
                    halted = true;
                    break;
                }
            }
        }
    }

    res.stop_iter = iter;
    if (settings.early_stop) {
        hooks.restore(tracker.best_snapshot());
        res.best_iter = tracker.best_iter();
    } else {
        res.best_iter = iter;
    }
    res.scores = hooks.final_scores();
    res.timings.train_seconds = train_s;
    res.timings.eval_seconds = eval_s;
    res.timings.total_seconds = seconds_since(wall_start);
    return res;
}

StopRunResult run_with_stop(OdModel& model, const Matrix& X, const Matrix& eval_X,
                            const TrainSettings& settings, const StopConfig& cfg,
                            const IterationCallback& cb) {
    if (eval_X.rows == 0) throw std::invalid_argument("run_with_stop: empty evaluation set");
    if (X.cols != model.input_dim() || eval_X.cols != model.input_dim())
        throw std::invalid_argument("run_with_stop: data width does not match model input");

    Adam opt(model.net(), settings.lr);
    std::size_t steps_done = 0;
    TrainLoopHooks hooks;
    hooks.train_step = [&](const std::vector<std::size_t>& rows) {
        ++steps_done;
        try {
            return model.train_step(X.gather_rows(rows), opt);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string(e.what()) + " at iteration " +
                                     std::to_string(steps_done));
        }
    };
    hooks.eval_losses = [&] { return model.score(eval_X); };
    hooks.final_scores = [&] { return model.score(X); };
    hooks.take_snapshot = [&](std::size_t iter) { return model.take_snapshot(iter); };
    hooks.restore = [&](const ParamSnapshot& s) { model.restore_snapshot(s); };
    if (cb) hooks.on_iteration = [&](std::size_t iter, double e) { cb(iter, e, model); };
    return run_stop_loop(hooks, X.rows, settings, cfg);
}

}  // namespace odstop
