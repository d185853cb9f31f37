#include "fbnet/auxiliary.hpp"

#include <cmath>
#include <stdexcept>

namespace fbnet {

namespace {

void check_tau(const ProblemSpec& spec, double tau, const char* who) {
    if (!(tau >= spec.tau_min))
        throw std::domain_error(std::string(who) + ": tau below tau_min");
}

}  // namespace

BoundaryTerms boundary_terms(const ProblemSpec& spec, double tau,
                             const NetJet& bj, BoundaryMode mode) {
    const double x = spec.x_max;
    const double K = spec.K;
    BoundaryTerms bt;
    bt.q = spec.gamma() / tau;
    bt.sf = K - x * bj.n;
    bt.sf_dot = -x * bj.n_tau;
    if (mode == BoundaryMode::CASE1) {
        // a = (2rK/σ² + γ(K−s̄)/(τx²) − K + x𝒩(τ,0) − 2𝒩_y(τ,0))·x, with
        // γ(K−s̄)/(τx²)·x ≡ q·b0 kept as one product (exact cancellation later).
        const double c = (2.0 * spec.r * K / (spec.sigma * spec.sigma) - K) * x;
        bt.a_reg = c + x * x * bj.n - 2.0 * x * bj.n_y;
        bt.a = bt.a_reg + bt.q * bj.n;
        // a′ = (−γ(K−s̄+τs̄′)/(τ²x²) + x𝒩_τ(τ,0) − 2𝒩_τy(τ,0))·x, rewritten in
        // jet terms: −(q/τ)·𝒩 + (q+x²)·𝒩_τ − 2x·𝒩_τy, all at y=0.
        bt.a_dot = -(bt.q / tau) * bj.n + (bt.q + x * x) * bj.n_tau - 2.0 * x * bj.n_tau_y;
    } else {
        // Case 2: a = γ(K−s̄)/(τx) − K + 𝒩_yy(τ,0) − 2x𝒩_y(τ,0), with the same
        // q·b0 grouping; a′ is its exact τ-derivative.
        bt.a_reg = -K + bj.n_yy - 2.0 * x * bj.n_y;
        bt.a = bt.a_reg + bt.q * bj.n;
        bt.a_dot = -(bt.q / tau) * bj.n + bt.q * bj.n_tau + bj.n_tau_yy - 2.0 * x * bj.n_tau_y;
    }
    return bt;
}

AuxEval assemble_aux(const ProblemSpec& spec, double tau, double y,
                     const NetJet& pj, const BoundaryTerms& bt) {
    const double x = spec.x_max;
    const double K = spec.K;
    const double q = bt.q;

    AuxEval r;
    r.sf = bt.sf;
    r.sf_dot = bt.sf_dot;
    r.a = bt.a;
    r.a_dot = bt.a_dot;

    const double ex = -0.5 * y * y * q;
    if (ex < -745.0) return r;  // e^{ex} == +0.0: every 𝒫-term vanishes exactly
    const double E = std::exp(ex);

    const double n0 = pj.n, nt = pj.n_tau, ny = pj.n_y, nyy = pj.n_yy;
    const double m0 = (K - bt.sf) / x;       // equals 𝒩(τ,0) up to rounding
    const double mt0 = -bt.sf_dot / x;       // equals 𝒩_τ(τ,0) up to rounding
    const double M = m0 + y * (-K + 0.5 * y * bt.a + x * n0);
    const double My = -K + y * bt.a + x * n0 + y * x * ny;
    const double Mt = mt0 + 0.5 * y * y * bt.a_dot + y * x * nt;

    // 𝒫_yy's bracket, regrouped so the q·b0 inside a cancels −q·ℳ exactly:
    // G = ℳ_yy − 2yq·ℳ_y + (y²q²−q)·ℳ
    //   = a_reg + 2x𝒩_y + yx𝒩_yy + qy(K − (y/2)a − x𝒩) + y²q²ℳ − 2yq·ℳ_y.
    const double yq = y * q;
    const double G = bt.a_reg + 2.0 * x * ny + y * x * nyy +
                     q * y * (K - 0.5 * y * bt.a - x * n0) + yq * yq * M -
                     2.0 * yq * My;

    r.p = E * M;
    r.p_y = E * (My - yq * M);
    r.p_tau = E * (Mt + (0.5 * y * y * q / tau) * M);
    r.p_yy = E * G;
    return r;
}

std::pair<double, double> free_boundary(const NetworkParams& params,
                                        const ProblemSpec& spec, double tau) {
    check_tau(spec, tau, "free_boundary");
    const NetJet bj = jet(params, tau, 0.0);
    return {spec.K - spec.x_max * bj.n, -spec.x_max * bj.n_tau};
}

std::pair<double, double> a_coeff(const NetworkParams& params, const ProblemSpec& spec,
                                  double tau, BoundaryMode mode) {
    check_tau(spec, tau, "a_coeff");
    const BoundaryTerms bt = boundary_terms(spec, tau, jet(params, tau, 0.0), mode);
    return {bt.a, bt.a_dot};
}

AuxEval evaluate(const NetworkParams& params, const ProblemSpec& spec, double tau,
                 double y, BoundaryMode mode) {
    check_tau(spec, tau, "evaluate");
    if (!(y >= 0.0 && y <= 1.0))
        throw std::domain_error("evaluate: y must lie in [0,1]");
    const NetJet bj = jet(params, tau, 0.0);
    const BoundaryTerms bt = boundary_terms(spec, tau, bj, mode);
    const NetJet pj = (y == 0.0) ? bj : jet(params, tau, y);
    return assemble_aux(spec, tau, y, pj, bt);
}

Greeks greeks(const NetworkParams& params, const ProblemSpec& spec, double tau,
              double y, BoundaryMode mode) {
    const AuxEval aux = evaluate(params, spec, tau, y, mode);
    Greeks g;
    g.S = aux.sf * std::exp(y * spec.x_max);
    g.V = spec.x_max * aux.p;
    g.Delta = aux.p_y / g.S;
    g.Gamma = aux.p_yy / (spec.x_max * g.S * g.S) - aux.p_y / (g.S * g.S);
    return g;
}

}  // namespace fbnet
