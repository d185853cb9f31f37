/**
 * @file residual.hpp
 * @brief Residual of the transformed free-boundary PDE, the mean-square
 *        collocation loss over a (τ,y) grid, and its exact parameter
 *        gradient via the jet-engine adjoint sweeps.
 */

#pragma once

#include "fbnet/auxiliary.hpp"
#include "fbnet/jet_engine.hpp"
#include "fbnet/problem.hpp"
#include "fbnet/sampler.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fbnet {

/// Thrown when |s̄_f(τ;ν)| falls below the 10⁻⁸·K division guard.
struct BoundaryGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * PDE residual at one point from an assembled AuxEval:
 *   ℛ = 𝒫_τ/T − σ²/(2x²_max)·𝒫_yy − (r − σ²/2 + s̄′_f/(T·s̄_f))/x_max·𝒫_y + r·𝒫.
 * @throws BoundaryGuardError if |s̄_f| < 10⁻⁸·K (the s̄′/s̄ quotient would
 *         amplify roundoff without bound).
 */
double pde_residual(const ProblemSpec& spec, const AuxEval& aux);

/// Non-loss observations reported by a loss evaluation.
struct LossDiagnostics {
    bool guard_tripped = false;  ///< some τ-row had |s̄_f| < 10⁻⁸·K
    double tau = 0.0;            ///< first offending τ
    double sf = 0.0;             ///< its s̄_f
};

/**
 * Mean-square PDE residual over a fixed collocation grid, and its exact
 * gradient with respect to every weight and bias.
 *
 * The grid is packed once at construction:
 *  - one 6-lane boundary batch holds the y=0 column (each τ-row's boundary
 *    jet feeds both that row's boundary coefficients and its own y=0
 *    residual point);
 *  - interior points whose Gaussian prefactor e^{−y²γ/(2τ)} is exactly zero
 *    in IEEE double are dropped — their residual, squared residual and
 *    every adjoint seed are exact zeros, so the loss and gradient are
 *    bit-identical to the unfiltered sums;
 *  - the surviving interior points run through a 4-lane engine in fixed-size
 *    chunks, forward + seed assembly + backward per chunk.
 *
 * The loss divides by the FULL grid cardinality N_τ·N_y and sums the squared
 * residuals with Kahan compensation in grid order (τ outer, y inner), so the
 * reported value does not depend on the chunk size and is bit-reproducible.
 *
 * Per τ-row the adjoints of the shared boundary quantities (a, a_reg, a′,
 * s̄_f, s̄′_f) are accumulated over the row's points and then converted into
 * seeds on the six lanes of that row's boundary jet; the boundary batch is
 * swept backward once at the end.
 */
class LossEvaluator {
public:
    /**
     * @param chunk interior batch size (points per forward/backward sweep)
     * @throws std::invalid_argument if the grid does not start at y = 0,
     *         runs below spec.tau_min, or the architecture is invalid.
     */
    LossEvaluator(const ProblemSpec& spec, const Grid& grid, const Architecture& arch,
                  BoundaryMode mode, std::size_t chunk = 256);

    /// Loss only. If the s̄_f guard trips: NaN, diagnostics filled if given.
    double loss(const NetworkParams& params, LossDiagnostics* diag = nullptr);

    /**
     * Loss and exact gradient. grad is overwritten (zeroed, then filled).
     * If the s̄_f guard trips, returns NaN with grad zeroed.
     */
    double loss_and_gradient(const NetworkParams& params, GradBlob& grad,
                             LossDiagnostics* diag = nullptr);

    /// Points that participate in compute (boundary column + live interior).
    std::size_t active_points() const { return taus_.size() + n_active_; }

    /// Full grid cardinality N_τ·N_y — the loss denominator.
    std::size_t full_points() const { return full_count_; }

private:
    double run(const NetworkParams& params, GradBlob* grad, LossDiagnostics* diag);

    ProblemSpec spec_;
    Architecture arch_;
    BoundaryMode mode_;
    std::size_t chunk_;
    std::size_t n_y_ = 0;
    std::size_t full_count_ = 0;

    std::vector<double> taus_;    // τ-rows, ascending
    std::vector<double> zeros_;   // y = 0 column fed to the boundary batch

    std::vector<double> pt_tau_;  // packed live interior points, grid order,
    std::vector<double> pt_y_;    // padded to a whole number of chunks
    std::size_t n_active_ = 0;           // live interior count (pre-padding)
    std::vector<std::int32_t> pt_row_;   // τ-row of each packed point
    std::vector<std::size_t> pt_lin_;    // row-major index into the full grid

    JetEngine bengine_;  // 6-lane boundary batch
    JetEngine iengine_;  // 4-lane interior chunks

    // scratch reused across calls
    std::vector<BoundaryTerms> bterms_;
    std::vector<double> r2_;
    Eigen::MatrixXd bseeds_, iseeds_;
};

}  // namespace fbnet
