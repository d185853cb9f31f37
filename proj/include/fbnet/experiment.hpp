/**
 * @file experiment.hpp
 * @brief Pinned experiment definitions (the published tables and figures as
 *        configurations), a content-addressed checkpoint cache, and the
 *        evaluation helpers that turn a trained network into CSV rows.
 *
 * A run is identified by the FNV-1a64 hash of its canonical config text —
 * problem, grid recipe, architecture, optimizer and seed — so any two
 * experiments with identical physics share one cached artifact regardless of
 * which table first trained it. Training is deterministic, hence a cached
 * checkpoint is bit-identical to what retraining would produce.
 */

#pragma once

#include "fbnet/auxiliary.hpp"
#include "fbnet/csv.hpp"
#include "fbnet/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fbnet {

/// Collocation-grid recipe; resolved against a ProblemSpec's tau_min.
struct GridSpec {
    std::string kind = "stretched";  ///< "uniform" | "random" | "stretched"
    int n_tau = 60;
    int n_y = 60;
    double p = 1.7;           ///< stretch exponent (stretched kind only)
    std::uint64_t seed = 7;   ///< draw seed (random kind only)

    void validate() const;
};

/// Materialize the recipe (tau_min comes from the problem).
Grid make_grid(const GridSpec& gs, const ProblemSpec& spec);

/// Everything that determines a training run. Defaults are the Method-1
/// stack on the default problem/grid.
struct ExperimentConfig {
    std::string name;  ///< artifact label; not part of the identity hash
    ProblemSpec problem;
    GridSpec grid;
    Architecture arch{{512, 256, 128, 64}};
    AdamHyper adam;
    BoundaryMode mode = BoundaryMode::CASE1;
    std::uint64_t seed = 1;
    double init_stddev = 0.1;

    void validate() const;

    /**
     * Deterministic key=value rendering of every identity-bearing field
     * (doubles via "%.17g"; grid.seed only for the random kind; name
     * excluded). Equal text ⇔ equal run.
     */
    std::string canonical() const;

    /// FNV-1a64 of canonical().
    std::uint64_t hash() const;
};

/// Architecture of Methods 1–8 (1–3: 512/256/128/64; 4–6: 200-wide stacks;
/// 7: 256/128/64/32; 8: 768/384/192/96).
Architecture method_arch(int method);

/// Adam settings of Methods 1–8 (2: no decay + β₁=0.9; 3: decay + β₁=0.9;
/// others: decay 2000×0.85 + β₁=0.99).
AdamHyper method_adam(int method);

// Pinned runs behind the published tables (scenario ∈ {"STM","MTM","LTM"},
// case-insensitive). Defaults follow the experiments section: Method 1,
// Case 1 boundary handling, 20,000 steps unless the table varies it.
ExperimentConfig table2_config(const std::string& scenario, const std::string& sampling,
                               std::uint64_t seed);  // 100×100; stretched p=2.0
ExperimentConfig table3_config(const std::string& scenario, double p,
                               std::uint64_t seed);  // 60×60 stretched
ExperimentConfig table4_config(const std::string& scenario, int n,
                               std::uint64_t seed);  // n×n stretched p=2.5
ExperimentConfig table8_xmax_config(const std::string& scenario, double x_max,
                                    std::uint64_t seed);  // Method 7, p=1.7
ExperimentConfig table8_taumin_config(const std::string& scenario, double tau_min,
                                      std::uint64_t seed);  // Method 7, p=1.7
ExperimentConfig table9_config(BoundaryMode mode,
                               std::uint64_t seed);  // LTM, 60×60 p=2.5
ExperimentConfig fig4_config(const std::string& scenario, int method,
                             std::uint64_t seed);  // 60×60 p=1.7

/// A trained run plus its summary quantities.
struct RunArtifacts {
    NetworkParams params;
    std::vector<TrainRecord> history;
    double final_loss = 0.0;
    double sf_T = 0.0;      ///< s̄_f(τ=1;ν) — boundary at physical t = T
    double sf_dot_T = 0.0;  ///< s̄′_f(τ=1;ν)
    double wall_seconds = 0.0;
    int guard_skips = 0;
    int nonfinite_skips = 0;
    std::uint64_t config_hash = 0;
    bool from_cache = false;
};

/// $FBNET_CACHE_DIR if set, else artifacts/cache (relative to the CWD).
std::filesystem::path cache_dir();

/**
 * Train the config from scratch (never consults the cache) and return the
 * artifacts. History rows stream through callbacks at the display cadence.
 * @throws std::invalid_argument on config errors.
 */
RunArtifacts run_experiment(const ExperimentConfig& config,
                            const TrainCallbacks& callbacks = {});

/**
 * Cached variant: loads checkpoint + summary when the config's hash is
 * present (verifying the stored canonical text matches), trains and stores
 * atomically otherwise. The returned artifacts are bit-identical either way.
 */
RunArtifacts ensure_trained(const ExperimentConfig& config,
                            const TrainCallbacks& callbacks = {});

/// Boundary curve s̄_f, s̄′_f on a uniform τ grid [tau_min, 1] (n_tau nodes).
std::vector<BoundaryRow> boundary_rows(const NetworkParams& params,
                                       const ProblemSpec& spec, int n_tau);

/// Surface + Greeks on a uniform (τ,y) prediction grid (training may use a
/// stretched grid; prediction follows the uniform-sampling convention).
std::vector<SurfaceRow> surface_rows(const NetworkParams& params, const ProblemSpec& spec,
                                     BoundaryMode mode, int n_tau, int n_y);

}  // namespace fbnet
