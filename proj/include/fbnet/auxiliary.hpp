/**
 * @file auxiliary.hpp
 * @brief The boundary-satisfying auxiliary function 𝒫(τ,y;ν) wrapped around
 *        the network, its derivatives, the boundary-coefficient functions
 *        a(τ;ν), a′(τ;ν), free-boundary extraction, and the Greeks map.
 */

#pragma once

#include "fbnet/network.hpp"
#include "fbnet/problem.hpp"

#include <utility>

namespace fbnet {

/**
 * How the second-derivative left-boundary value is supplied:
 * CASE1 imposes it in pseudo-exact form, 𝒫_yy(τ,0) = (2rK/σ² − s̄_f)·x_max;
 * CASE2 reads it off the network, 𝒫_yy(τ,0) = 𝒩_yy(τ,0) − K (the −K offset
 * is part of the Case-2 definition of a).
 */
enum class BoundaryMode { CASE1, CASE2 };

/**
 * 𝒫 and its derivatives at one point, plus the per-τ boundary quantities
 * they are built from. All are raw network images — never clamped.
 */
struct AuxEval {
    double p = 0.0;       ///< 𝒫(τ,y;ν)
    double p_y = 0.0;     ///< ∂𝒫/∂y
    double p_tau = 0.0;   ///< ∂𝒫/∂τ
    double p_yy = 0.0;    ///< ∂²𝒫/∂y²
    double sf = 0.0;      ///< s̄_f(τ;ν) = K − x_max·𝒩(τ,0) (currency)
    double sf_dot = 0.0;  ///< s̄′_f(τ;ν) = −x_max·𝒩_τ(τ,0)
    double a = 0.0;       ///< boundary coefficient a(τ;ν)
    double a_dot = 0.0;   ///< a′(τ;ν)
};

/**
 * Per-τ quantities shared by every point of a τ-row. a is carried in the
 * split form a = a_reg + q·b0 (q = γ/τ, b0 = 𝒩(τ,0)): the O(γ/τ) part must
 * cancel algebraically — not in floating point — inside 𝒫_yy near τ_min,
 * where γ/τ reaches 10^10 and naive assembly loses the boundary identity.
 */
struct BoundaryTerms {
    double sf = 0.0;
    double sf_dot = 0.0;
    double a = 0.0;
    double a_reg = 0.0;  ///< a − q·b0, grouped exactly
    double a_dot = 0.0;
    double q = 0.0;      ///< γ/τ
};

/// Boundary quantities from the y=0 network jet (linear images of the jet).
BoundaryTerms boundary_terms(const ProblemSpec& spec, double tau,
                             const NetJet& boundary_jet, BoundaryMode mode);

/**
 * Assemble 𝒫 and derivatives from a point jet and the row's boundary terms.
 * When the prefactor exponent −y²γ/(2τ) is below −745, e^{·} is exactly 0 in
 * IEEE double and every 𝒫-term short-circuits to exactly 0 (no 0·∞).
 */
AuxEval assemble_aux(const ProblemSpec& spec, double tau, double y,
                     const NetJet& point_jet, const BoundaryTerms& bt);

/// s̄_f and s̄′_f at τ: exact linear images of the y=0 jet. Never clamped.
std::pair<double, double> free_boundary(const NetworkParams& params,
                                        const ProblemSpec& spec, double tau);

/// (a, a′) at τ for the chosen boundary mode. Rejects τ < τ_min (q = γ/τ guard).
std::pair<double, double> a_coeff(const NetworkParams& params, const ProblemSpec& spec,
                                  double tau, BoundaryMode mode);

/// Full auxiliary evaluation at (τ,y). Rejects τ < τ_min or y outside [0,1].
AuxEval evaluate(const NetworkParams& params, const ProblemSpec& spec, double tau,
                 double y, BoundaryMode mode);

/// Option value and Greeks at S = s̄_f·e^{y·x_max} (chain rule through the
/// Landau map at fixed τ): V = x_max·𝒫, Δ = 𝒫_y/S, Γ = 𝒫_yy/(x_max·S²) − 𝒫_y/S².
struct Greeks {
    double S = 0.0;
    double V = 0.0;
    double Delta = 0.0;
    double Gamma = 0.0;
};

Greeks greeks(const NetworkParams& params, const ProblemSpec& spec, double tau,
              double y, BoundaryMode mode = BoundaryMode::CASE1);

}  // namespace fbnet
