/**
 * @file problem.hpp
 * @brief American put contract/domain parameters and the coordinate maps
 *        between asset space (t,S), Landau space (t,x) and normalized (τ,y).
 */

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace fbnet {

/**
 * Contract and domain parameters of the free-boundary problem.
 *
 * The solver works in normalized coordinates τ = t/T (t is time to expiry)
 * and y = x/x_max, where x = ln S − ln s_f(t) is the front-fixing Landau
 * coordinate. γ = rK/σ² controls the decay speed of the auxiliary function's
 * exponential prefactor.
 */
struct ProblemSpec {
    double K = 100.0;       ///< Strike (currency)
    double T = 1.0;         ///< Maturity (years)
    double r = 0.05;        ///< Risk-free rate (1/year)
    double sigma = 0.2;     ///< Volatility (1/sqrt(year))
    double x_max = 6.0;     ///< Truncation of Landau space (dimensionless)
    double tau_min = 1e-8;  ///< Smallest normalized time evaluated

    /// Decay-speed constant γ = rK/σ² of the auxiliary prefactor.
    double gamma() const { return r * K / (sigma * sigma); }

    void validate() const {
        if (!(K > 0.0)) throw std::invalid_argument("problem.K must be > 0");
        if (!(T > 0.0)) throw std::invalid_argument("problem.T must be > 0");
        if (!(r > 0.0)) throw std::invalid_argument("problem.r must be > 0");
        if (!(sigma > 0.0)) throw std::invalid_argument("problem.sigma must be > 0");
        if (!(x_max > 0.0)) throw std::invalid_argument("problem.x_max must be > 0");
        if (!(tau_min > 0.0 && tau_min < 1.0))
            throw std::invalid_argument("problem.tau_min must lie in (0,1)");
        if (!std::isfinite(gamma()))
            throw std::invalid_argument("problem: gamma()=rK/sigma^2 is not finite");
    }
};

/// Named parameter presets (Table-1 rows: short/medium/long time to maturity).
ProblemSpec preset_stm();
ProblemSpec preset_mtm();
ProblemSpec preset_ltm();

/// Look up a preset by name ("STM"/"MTM"/"LTM", case-insensitive);
/// throws std::invalid_argument for unknown names.
ProblemSpec preset_by_name(const std::string& name);

/**
 * Landau transform x = ln S − ln s_f. Maps the moving boundary S = s_f(t) to
 * the fixed line x = 0.
 * @throws std::domain_error if S ≤ 0 or s_f ≤ 0.
 */
double landau_forward(const ProblemSpec& spec, double S, double s_f);

/**
 * Normalization (t,x) → (τ,y) = (t/T, x/x_max).
 * @throws std::domain_error outside 0 ≤ t ≤ T, 0 ≤ x ≤ x_max.
 */
std::pair<double, double> to_normalized(const ProblemSpec& spec, double t, double x);

/**
 * Inverse map to asset space: S = s_f · e^{y·x_max}.
 * @throws std::domain_error if s_f ≤ 0 or y outside [0,1].
 */
double asset_price_of(const ProblemSpec& spec, double y, double s_f);

}  // namespace fbnet
