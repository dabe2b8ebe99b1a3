#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

#include "odstop/matrix.hpp"
#include "odstop/nn.hpp"
#include "odstop/od_model.hpp"

namespace odstop {

// Knobs of the entropy-based early-stopping rule.
struct StopConfig {
    std::size_t patience = 100;        // halt after this many consecutive rejections
    double downtrend_threshold = 0.1;  // required drop share of accumulated variation
    std::size_t eval_size = 1024;      // entropy evaluation subset size
    std::size_t max_iters = 0;         // training horizon

    void validate() const;  // throws std::invalid_argument on bad values
};

enum class StopDecision { new_best, waiting, halt };

/**
 * Online tracker of the entropy-curve minimum.
 *
 * Feed it the entropy value after every training iteration. A new value is
 * accepted as the new minimum only when it undercuts the previous minimum
 * by more than `downtrend_threshold` of the total variation accumulated
 * since the last acceptance; this filters out noisy dips on an otherwise
 * flat or rising curve. Every rejection raises the patience counter, every
 * acceptance resets it, and the tracker halts exactly when the counter
 * reaches the configured patience. Parameters are snapshotted only on
 * acceptance, so the best state can be restored after the halt.
 */
class StopTracker {
public:
    // Initialise with the pre-training entropy e_0 and parameter state.
    StopTracker(const StopConfig& cfg, double e0, ParamSnapshot initial);

    // Observe entropy after iteration `iter` (1-based, strictly increasing by
    // one per call). `take_snapshot` is invoked only when the value is
    // accepted. Throws std::logic_error when called after a halt and
    // std::invalid_argument on non-finite entropy.
    StopDecision observe(double entropy, std::size_t iter,
                         const std::function<ParamSnapshot()>& take_snapshot);

    double min_entropy() const { return min_entropy_; }
    double accumulated_variation() const { return variation_; }
    std::size_t patience_count() const { return patience_count_; }
    std::size_t best_iter() const { return best_.iteration; }
    const ParamSnapshot& best_snapshot() const { return best_; }
    bool halted() const { return halted_; }

private:
    StopConfig cfg_;
    double min_entropy_;
    double prev_entropy_;
    double variation_ = 0.0;  // sum of |e_j - e_{j-1}| since the last acceptance
    std::size_t patience_count_ = 0;
    std::size_t next_iter_ = 1;
    bool halted_ = false;
    ParamSnapshot best_;
};

// Per-iteration training settings for the run loops.
struct TrainSettings {
    double lr = 1e-3;
    std::size_t batch_size = 1024;
    std::uint64_t seed = 0;
    bool early_stop = true;  // false trains the full horizon (vanilla baseline)
};

struct RunTimings {
    double train_seconds = 0.0;  // optimiser steps only
    double eval_seconds = 0.0;   // entropy evaluation only
    double total_seconds = 0.0;  // whole loop including logging callbacks
};

struct StopRunResult {
    std::vector<double> entropy_curve;  // index 0 = pre-training entropy
    std::size_t stop_iter = 0;          // last executed iteration
    std::size_t best_iter = 0;          // iteration of the restored parameters
    std::vector<double> scores;         // final scores over all data
    RunTimings timings;
};

// Invoked after initialisation (iter 0) and after every training iteration,
// with the model in its current state. Used by the harness to log
// label-based metrics; the stopping path itself never sees labels.
using IterationCallback = std::function<void(std::size_t iter, double entropy, const OdModel&)>;

// Model-agnostic seams of the training loop, used to drive the loop engine
// with stub models in tests. `train_step` returns the mean batch loss,
// `eval_losses` the per-sample losses on the fixed evaluation subset.
struct TrainLoopHooks {
    std::function<double(const std::vector<std::size_t>& batch_rows)> train_step;
    std::function<std::vector<double>()> eval_losses;
    std::function<std::vector<double>()> final_scores;
    std::function<ParamSnapshot(std::size_t iter)> take_snapshot;
    std::function<void(const ParamSnapshot&)> restore;
    std::function<void(std::size_t iter, double entropy)> on_iteration;  // may be empty
};

// Core loop: batches per epoch, one entropy evaluation per iteration, stop
// tracking when enabled, best-state restoration at the end. `n_rows` is the
// training-set size used to form batches.
StopRunResult run_stop_loop(const TrainLoopHooks& hooks, std::size_t n_rows,
                            const TrainSettings& settings, const StopConfig& cfg);

/**
 * Trains the model with entropy-based early stopping and returns the scores
 * of the best tracked state over all of `X`.
 *
 * `eval_X` is the fixed evaluation subset used for the entropy curve; it must
 * not change during the run. With settings.early_stop == false the loop just
 * runs the full horizon and keeps the final parameters (best_iter ==
 * stop_iter), still recording the entropy curve.
 */
StopRunResult run_with_stop(OdModel& model, const Matrix& X, const Matrix& eval_X,
                            const TrainSettings& settings, const StopConfig& cfg,
                            const IterationCallback& cb = nullptr);

}  // namespace odstop
