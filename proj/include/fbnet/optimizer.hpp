/**
 * @file optimizer.hpp
 * @brief Full-batch Adam with a staircase learning-rate schedule, and the
 *        end-to-end training driver.
 */

#pragma once

#include "fbnet/jet_engine.hpp"
#include "fbnet/network.hpp"
#include "fbnet/problem.hpp"
#include "fbnet/residual.hpp"
#include "fbnet/sampler.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fbnet {

/// Adam and schedule hyperparameters (one "method" = one filled-in set).
struct AdamHyper {
    double lr0 = 1e-3;          ///< initial learning rate
    double beta1 = 0.99;        ///< first-moment decay
    double beta2 = 0.999;       ///< second-moment decay
    double eps = 1e-8;          ///< denominator offset
    int steps = 20000;          ///< total iterations
    int decay_step = 2000;      ///< stairs width; 0 disables decay
    double decay_rate = 0.85;   ///< per-stair multiplier
    bool smooth_decay = false;  ///< continuous exponent instead of stairs
    int display_step = 1000;    ///< history cadence

    void validate() const;
};

/**
 * Learning rate at a 0-based step: lr0·rate^⌊step/decay_step⌋ (staircase) or
 * lr0·rate^(step/decay_step) (smooth); plain lr0 when decay_step == 0.
 */
double lr_at(const AdamHyper& hyper, int step);

/// One history row (the history CSV mirrors these fields).
struct TrainRecord {
    int step = 0;
    double lr = 0.0;
    double loss = 0.0;
    double elapsed_s = 0.0;
};

/// Adam accumulators. t counts completed updates (bias correction uses t+1
/// at update time, so the very first step is corrected with t = 1).
struct AdamState {
    GradBlob m;
    GradBlob v;
    int t = 0;

    static AdamState zeros_like(const NetworkParams& params);
};

/**
 * One in-place Adam update. Refuses (returns false, touches nothing) if any
 * gradient entry is non-finite.
 */
bool adam_step(NetworkParams& params, AdamState& state, const GradBlob& grad,
               const AdamHyper& hyper, double lr);

/// Observers for the training loop. Either may be empty.
struct TrainCallbacks {
    std::function<void(const TrainRecord&)> on_record;
    std::function<void(const std::string&)> on_diagnostic;
};

struct TrainResult {
    NetworkParams params;
    std::vector<TrainRecord> history;  ///< rows at the display cadence + final
    double final_loss = 0.0;           ///< loss after the last update
    int guard_skips = 0;               ///< steps skipped by the s̄_f guard
    int nonfinite_skips = 0;           ///< steps skipped by the finiteness guard
};

/**
 * Train a fresh network on the grid: full-batch loss_and_gradient each step,
 * one Adam update per step. Steps whose loss evaluation trips the s̄_f guard,
 * or whose gradient is non-finite, are skipped (counted, reported through
 * on_diagnostic) — the step index still advances, so the schedule is
 * unaffected. Single-threaded and deterministic: one (seed, grid, hyper)
 * tuple always yields the same parameters bit for bit.
 */
TrainResult train(const ProblemSpec& spec, const Grid& grid, const Architecture& arch,
                  BoundaryMode mode, const AdamHyper& hyper, std::uint64_t seed,
                  double init_stddev = 0.1, const TrainCallbacks& callbacks = {});

}  // namespace fbnet
