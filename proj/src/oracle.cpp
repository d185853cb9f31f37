/**
 * @file oracle.cpp
 * @brief CRR binomial lattice and Crank–Nicolson/PSOR oracles.
 */

#include "fbnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbnet {

namespace {

/// One plain CRR evaluation (no extrapolation).
double crr_put(const ProblemSpec& spec, double S0, int steps) {
    const double dt = spec.T / steps;
    const double u = std::exp(spec.sigma * std::sqrt(dt));
    const double d = 1.0 / u;
    const double disc = std::exp(-spec.r * dt);
    // Clamped risk-neutral weight: for degenerate lattices (σ√Δt ≪ rΔt) the
    // raw quotient leaves [0,1]; the clamp keeps the induction a convex
    // combination, which is what drives the σ→0 immediate-exercise limit.
    const double p =
        std::clamp((std::exp(spec.r * dt) - d) / (u - d), 0.0, 1.0);

    // Terminal payoffs at S0·u^(2j−steps), j = 0..steps.
    std::vector<double> v(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        const double S = S0 * std::exp((2 * j - steps) * spec.sigma * std::sqrt(dt));
        v[static_cast<std::size_t>(j)] = std::max(spec.K - S, 0.0);
    }

    for (int m = steps - 1; m >= 0; --m) {
        for (int j = 0; j <= m; ++j) {
            const double cont = disc * (p * v[static_cast<std::size_t>(j) + 1] +
                                        (1.0 - p) * v[static_cast<std::size_t>(j)]);
            const double S = S0 * std::exp((2 * j - m) * spec.sigma * std::sqrt(dt));
            v[static_cast<std::size_t>(j)] = std::max(cont, spec.K - S);
        }
    }
    return v[0];
}

}  // namespace

double binomial_put(const ProblemSpec& spec, double S0, const LatticeConfig& cfg) {
    spec.validate();
    if (!(S0 > 0.0) || !std::isfinite(S0))
        throw std::invalid_argument("binomial_put: S0 must be positive");
    if (cfg.steps < 1) throw std::invalid_argument("binomial_put: steps must be >= 1");
    const double coarse = crr_put(spec, S0, cfg.steps);
    if (!cfg.smoothing) return coarse;
    const double fine = crr_put(spec, S0, 2 * cfg.steps);
    return 2.0 * fine - coarse;
}

void FdConfig::validate() const {
    if (ns < 4 || nt < 4) throw std::invalid_argument("FdConfig: ns and nt must be >= 4");
    if (!(omega > 1.0 && omega < 2.0))
        throw std::invalid_argument("FdConfig: omega must lie in (1, 2)");
    if (!(tol > 0.0)) throw std::invalid_argument("FdConfig: tol must be positive");
    if (max_sweeps < 1) throw std::invalid_argument("FdConfig: max_sweeps must be >= 1");
    if (s_max < 0.0) throw std::invalid_argument("FdConfig: s_max must be >= 0");
}

PsorResult psor_boundary(const ProblemSpec& spec, const FdConfig& cfg) {
    spec.validate();
    cfg.validate();
    const double s_max = (cfg.s_max > 0.0) ? cfg.s_max : 4.0 * spec.K;
    const int ns = cfg.ns, nt = cfg.nt;
    const double dS = s_max / ns;
    const double dtau = spec.T / nt;

    std::vector<double> S(static_cast<std::size_t>(ns) + 1);
    std::vector<double> payoff(S.size());
    for (int i = 0; i <= ns; ++i) {
        S[static_cast<std::size_t>(i)] = i * dS;
        payoff[static_cast<std::size_t>(i)] = std::max(spec.K - i * dS, 0.0);
    }

    // Spatial operator at node i (S = i·ΔS):
    //   L V = ½σ²S²V_SS + rSV_S − rV
    //       = α_i(V_{i+1} − 2V_i + V_{i−1}) + β_i(V_{i+1} − V_{i−1}) − rV_i,
    // α_i = ½σ²i², β_i = ½ri — ΔS cancels on the uniform grid.
    std::vector<double> alpha(S.size()), beta(S.size());
    for (int i = 1; i < ns; ++i) {
        alpha[static_cast<std::size_t>(i)] = 0.5 * spec.sigma * spec.sigma * double(i) * i;
        beta[static_cast<std::size_t>(i)] = 0.5 * spec.r * i;
    }

    PsorResult out;
    out.S = S;
    out.taus.resize(static_cast<std::size_t>(nt) + 1);
    out.boundary.resize(out.taus.size());
    out.taus[0] = 0.0;
    out.boundary[0] = spec.K;  // contact region reaches the strike at expiry

    std::vector<double> v = payoff;  // τ = 0
    std::vector<double> rhs(S.size());

    for (int m = 1; m <= nt; ++m) {
        // Two backward-Euler start-up steps (θ=1) damp the payoff kink that
        // plain Crank–Nicolson (θ=½) would oscillate on.
        const double theta = (m <= 2) ? 1.0 : 0.5;

        for (int i = 1; i < ns; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            const double Lv = alpha[iu] * (v[iu + 1] - 2.0 * v[iu] + v[iu - 1]) +
                              beta[iu] * (v[iu + 1] - v[iu - 1]) - spec.r * v[iu];
            rhs[iu] = v[iu] + (1.0 - theta) * dtau * Lv;
        }

        // Dirichlet rails: V(0) = K (immediate exercise), V(s_max) = 0.
        v[0] = spec.K;
        v[static_cast<std::size_t>(ns)] = 0.0;

        // Projected SOR on (I − θΔτL)V = rhs with obstacle V ≥ payoff.
        int sweep = 0;
        for (; sweep < cfg.max_sweeps; ++sweep) {
            double delta = 0.0;
            for (int i = 1; i < ns; ++i) {
                const auto iu = static_cast<std::size_t>(i);
                const double sub = alpha[iu] - beta[iu];
                const double sup = alpha[iu] + beta[iu];
                const double diag = 1.0 + theta * dtau * (2.0 * alpha[iu] + spec.r);
                const double gs =
                    (rhs[iu] + theta * dtau * (sub * v[iu - 1] + sup * v[iu + 1])) / diag;
                const double cand = v[iu] + cfg.omega * (gs - v[iu]);
                const double proj = std::max(payoff[iu], cand);
                delta = std::max(delta, std::abs(proj - v[iu]));
                v[iu] = proj;
            }
            if (delta < cfg.tol) break;
        }
        if (sweep == cfg.max_sweeps)
            throw std::runtime_error("psor_boundary: no convergence at time step " +
                                     std::to_string(m));

        // Boundary: the largest in-the-money contact node, refined by the
        // contact gap in √ scale (g = V − payoff ≈ C(S−s_f)² near s_f, so
        // √g is linear and its extrapolated zero estimates s_f). The
        // projected discrete solution extends contact up to a cell past the
        // smooth-pasting point, so the zero may legitimately fall below the
        // last contact node; clamp at one cell of undershoot.
        int ic = 0;
        for (int i = ns - 1; i >= 1; --i) {
            const auto iu = static_cast<std::size_t>(i);
            if (payoff[iu] > 0.0 && v[iu] <= payoff[iu]) {
                ic = i;
                break;
            }
        }
        double sf = S[static_cast<std::size_t>(ic)];
        if (ic >= 1 && ic + 2 <= ns) {
            const double g1 = v[static_cast<std::size_t>(ic) + 1] -
                              payoff[static_cast<std::size_t>(ic) + 1];
            const double g2 = v[static_cast<std::size_t>(ic) + 2] -
                              payoff[static_cast<std::size_t>(ic) + 2];
            if (g1 > 0.0 && g2 > g1) {
                const double r1 = std::sqrt(g1), r2 = std::sqrt(g2);
                const double step = r1 / (r2 - r1) * dS;
                sf = std::clamp(S[static_cast<std::size_t>(ic) + 1] - step,
                                S[static_cast<std::size_t>(ic)] - dS,
                                S[static_cast<std::size_t>(ic) + 1]);
            }
        }
        out.taus[static_cast<std::size_t>(m)] = m * dtau;
        out.boundary[static_cast<std::size_t>(m)] = sf;
    }

    out.V = v;
    return out;
}

}  // namespace fbnet
