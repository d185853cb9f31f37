/**
 * @file jet_engine.hpp
 * @brief Batched jet propagation through the MLP and its exact reverse-mode
 *        adjoint: parameter gradients of any scalar assembled from network
 *        jets, differentiated THROUGH the third-order input derivatives.
 */

#pragma once

#include "fbnet/network.hpp"

#include <Eigen/Core>
#include <span>

namespace fbnet {

/// Gradient (or any parameter-shaped blob: Adam moments, etc.).
struct GradBlob {
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;

    static GradBlob zeros_like(const NetworkParams& params);
    void set_zero();
};

/**
 * Workspace for lane-batched forward/backward sweeps.
 *
 * Lanes are derivative slots of the jet, in fixed order
 *   0:value  1:∂τ  2:∂y  3:∂yy  4:∂τy  5:∂τyy.
 * Interior PDE points only need lanes 0–3; the y=0 boundary column needs all
 * six (a′ consumes 𝒩_τy and, in Case 2, 𝒩_τyy). Per layer the engine runs
 * one GEMM over the lane-concatenated activation block, then applies the
 * sigmoid jet rules elementwise; the backward sweep applies the hand-derived
 * adjoints of those rules and accumulates weight gradients with one GEMM per
 * layer. All reductions have a fixed order, so results are bit-reproducible.
 *
 * forward() retains the per-layer pre/post-activation lanes so that a
 * backward() call for the same batch can follow; callers chunk large point
 * sets and accumulate into one GradBlob.
 */
class JetEngine {
public:
    /// @param lanes 4 (interior batches) or 6 (boundary batches / generic use)
    JetEngine(const Architecture& arch, int lanes);

    int lanes() const { return lanes_; }

    /**
     * Jet-propagate a batch; returns jets as an N×lanes matrix (column = lane).
     * Lane values equal the single-point jet() up to GEMM reassociation.
     */
    const Eigen::MatrixXd& forward(const NetworkParams& params,
                                   std::span<const double> taus,
                                   std::span<const double> ys);

    /**
     * Reverse sweep for the most recent forward(): seeds(i,l) = ∂scalar/∂jet_l
     * at point i. Accumulates ∂scalar/∂ν into grad (+=).
     */
    void backward(const NetworkParams& params, const Eigen::MatrixXd& seeds,
                  GradBlob& grad);

private:
    Architecture arch_;
    int lanes_;
    Eigen::Index n_ = 0;                 // active batch size
    std::vector<Eigen::MatrixXd> U_;     // pre-activation lanes, per hidden layer
    std::vector<Eigen::MatrixXd> A_;     // post-activation lanes, per hidden layer
    Eigen::MatrixXd X_;                  // input lanes
    Eigen::MatrixXd jets_;               // N×lanes output
    Eigen::MatrixXd Zbar_, Ubar_;        // backward scratch
};

/**
 * A scalar functional of the network jets at a fixed point set, together with
 * its exact partials w.r.t. every jet entry (the adjoint seeds). Implementors
 * must fill seeds analytically — finite differences are not acceptable here.
 */
class JetFunctional {
public:
    virtual ~JetFunctional() = default;
    /// @param jets  N×6 jet values  @param seeds N×6 output, ∂scalar/∂jet
    virtual double value_and_seeds(const Eigen::MatrixXd& jets,
                                   Eigen::MatrixXd& seeds) const = 0;
};

/**
 * Exact ∂scalar/∂ν for a functional of the jets at the given points.
 * Runs a full 6-lane sweep; suited to tests and small point sets (the
 * training loss uses a specialized two-batch path in the residual module
 * built on the same JetEngine kernels).
 */
GradBlob param_gradient(const NetworkParams& params,
                        std::span<const double> taus,
                        std::span<const double> ys,
                        const JetFunctional& fn,
                        double* value_out = nullptr);

}  // namespace fbnet
