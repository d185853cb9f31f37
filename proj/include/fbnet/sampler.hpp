/**
 * @file sampler.hpp
 * @brief Generation of the (τ,y) training/evaluation grids: uniform,
 *        randomly structured, and stretched.
 */

#pragma once

#include <cstdint>
#include <vector>

namespace fbnet {

enum class GridKind { UNIFORM, RANDOM_STRUCTURED, STRETCHED };

/**
 * A structured grid: the full point set is the Cartesian product taus × ys.
 * Both axes are strictly increasing; taus[0] is the τ floor, ys spans [0,1].
 */
struct Grid {
    std::vector<double> taus;  ///< strictly increasing, taus.front() ≥ τ_min
    std::vector<double> ys;    ///< strictly increasing, in [0,1]
    GridKind kind = GridKind::UNIFORM;
    double p = 1.0;            ///< stretch exponent (1 for non-stretched)
    std::uint64_t seed = 0;    ///< RNG seed (RANDOM_STRUCTURED only)

    std::size_t n_tau() const { return taus.size(); }
    std::size_t n_y() const { return ys.size(); }
    std::size_t size() const { return taus.size() * ys.size(); }
};

/**
 * Equispaced τ-axis on [tau_min,1] and y-axis on [0,1].
 * @throws std::invalid_argument if n_tau or n_y < 2, or tau_min outside (0,1).
 */
Grid uniform_grid(int n_tau, int n_y, double tau_min);

/**
 * Per axis: draw n i.i.d. uniforms, sort ascending, and rescale affinely so
 * the extremes land exactly on the interval endpoints ([tau_min,1] for τ,
 * [0,1] for y). The grid stays a Cartesian product ("structured").
 * Same seed ⇒ identical grid.
 */
Grid random_structured_grid(int n_tau, int n_y, std::uint64_t seed, double tau_min);

/**
 * Power-law stretching of a uniform grid: y = u^√p on [0,1], τ = u^p with the
 * uniform u-axis generated on [tau_min^{1/p}, 1] so the stretched τ floor is
 * exactly tau_min. p = 1 reproduces uniform_grid. Clusters points near the
 * payoff singularity (τ→0, y→0).
 * @throws std::invalid_argument if p < 1.
 */
Grid stretched_grid(int n_tau, int n_y, double p, double tau_min);

}  // namespace fbnet
