/**
 * @file oracle.hpp
 * @brief Independent ground-truth pricers: a CRR binomial lattice for values
 *        and a projected-SOR Crank–Nicolson finite-difference solver for the
 *        early exercise curve. Both price the same American put as the
 *        network, with no shared code path.
 */

#pragma once

#include "fbnet/problem.hpp"

#include <vector>

namespace fbnet {

/// Binomial-lattice settings.
struct LatticeConfig {
    int steps = 10000;        ///< tree depth (≥ 100 for acceptance use)
    bool smoothing = false;   ///< Richardson extrapolation over (steps, 2·steps)
};

/**
 * American put value by CRR backward induction with an early-exercise max at
 * every node. With smoothing on, the value is the Richardson extrapolation
 * 2·V(2n) − V(n), cancelling the O(Δt) lattice bias.
 * @throws std::invalid_argument if S0 ≤ 0 or steps < 1.
 */
double binomial_put(const ProblemSpec& spec, double S0, const LatticeConfig& cfg = {});

/// Finite-difference settings. Defaults give ΔS = 0.2 on [0, 4K] for K = 100.
struct FdConfig {
    int ns = 2000;        ///< space intervals on [0, s_max]
    int nt = 2000;        ///< time steps on [0, T]
    double s_max = 0.0;   ///< domain cap; 0 → 4·K
    double omega = 1.2;   ///< PSOR relaxation, in (1, 2)
    double tol = 1e-8;    ///< PSOR sweep tolerance
    int max_sweeps = 20000;

    void validate() const;
};

/// PSOR solve output: exercise boundary per τ level plus the final surface.
struct PsorResult {
    std::vector<double> taus;      ///< 0, Δτ, …, T (time to expiry)
    std::vector<double> boundary;  ///< s_f at each τ (s_f(0) = K)
    std::vector<double> S;         ///< space nodes 0 … s_max
    std::vector<double> V;         ///< value surface at τ = T over S
};

/**
 * Black–Scholes American-put linear complementarity problem on a uniform
 * (S,τ) grid: Crank–Nicolson time stepping (two backward-Euler start-up
 * steps damp the payoff kink), each step solved by projected SOR against the
 * payoff obstacle. Per τ level the exercise boundary is the largest contact
 * node, refined by extrapolating the contact gap of the next two nodes to
 * zero in the √ scale (smooth pasting makes V − payoff locally quadratic,
 * so √gap is the linear quantity).
 * @throws std::runtime_error if a PSOR solve exceeds cfg.max_sweeps
 *         (message names the failing time step).
 */
PsorResult psor_boundary(const ProblemSpec& spec, const FdConfig& cfg = {});

}  // namespace fbnet
