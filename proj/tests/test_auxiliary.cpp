#include "fbnet/auxiliary.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>

using namespace fbnet;

namespace {

Architecture arch_of(std::initializer_list<int> hidden) {
    Architecture a;
    a.hidden = hidden;
    return a;
}

// All weights zero: 𝒩 ≡ 0 with every derivative zero, so each auxiliary
// quantity collapses to a closed form.
NetworkParams zero_net() {
    NetworkParams p = init_params(arch_of({4}), 1, 0.1);
    for (auto& W : p.W) W.setZero();
    for (auto& b : p.b) b.setZero();
    return p;
}

}  // namespace

TEST_CASE("zero network: closed-form boundary coefficients") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = zero_net();

    // s̄_f ≡ K, s̄′_f ≡ 0
    const auto [sf, sf_dot] = free_boundary(p, spec, 0.5);
    CHECK(sf == 100.0);
    CHECK(sf_dot == 0.0);

    // Case 1: a = (2rK/σ² − K)·x_max = (400−100)·6; a′ = 0
    const auto [a1, a1dot] = a_coeff(p, spec, 1.0, BoundaryMode::CASE1);
    CHECK(a1 == doctest::Approx(1800.0).epsilon(1e-14));
    CHECK(a1dot == 0.0);

    // Case 2: a = −K; a′ = 0
    const auto [a2, a2dot] = a_coeff(p, spec, 1.0, BoundaryMode::CASE2);
    CHECK(a2 == -100.0);
    CHECK(a2dot == 0.0);
}

TEST_CASE("zero network: closed-form auxiliary values at (tau,y) = (1, 0.1)") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = zero_net();
    const AuxEval aux = evaluate(p, spec, 1.0, 0.1, BoundaryMode::CASE1);

    // E = e^{−1}, ℳ = 0.1·(−100+90) = −1, ℳ_y = 80, G = 1800+200−400−3200
    CHECK(aux.p == doctest::Approx(-0.3678794411714429).epsilon(1e-13));
    CHECK(aux.p_y == doctest::Approx(36.787944117144235).epsilon(1e-13));
    CHECK(aux.p_tau == doctest::Approx(-0.3678794411714429).epsilon(1e-13));
    CHECK(aux.p_yy == doctest::Approx(-588.6071058743078).epsilon(1e-13));
    CHECK(aux.sf == 100.0);
    CHECK(aux.sf_dot == 0.0);
}

TEST_CASE("boundary identities hold at y = 0, down to tau_min") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = init_params(arch_of({8, 8}), 5, 1.0);
    const double taus[] = {1e-8, 1e-6, 1e-4, 0.05, 0.5, 1.0};

    for (const BoundaryMode mode : {BoundaryMode::CASE1, BoundaryMode::CASE2}) {
        for (const double tau : taus) {
            const AuxEval aux = evaluate(p, spec, tau, 0.0, mode);
            const auto [sf, sf_dot] = free_boundary(p, spec, tau);
            CHECK(std::abs(aux.p - (spec.K - sf) / spec.x_max) <= 1e-12 * spec.K);
            CHECK(std::abs(aux.p_y - (-sf)) <= 1e-10 * spec.K);
            CHECK(std::abs(aux.p_tau - (-sf_dot / spec.x_max)) <= 1e-10 * spec.K);

            const NetJet bj = jet(p, tau, 0.0);
            const double want_pyy =
                (mode == BoundaryMode::CASE1)
                    ? (2.0 * spec.r * spec.K / (spec.sigma * spec.sigma) - sf) *
                          spec.x_max
                    : bj.n_yy - spec.K;
            CHECK(std::abs(aux.p_yy - want_pyy) <= 1e-8 * spec.K * spec.x_max);
        }
    }
}

TEST_CASE("a' is the tau-derivative of a, both boundary cases") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = init_params(arch_of({8, 8}), 5, 1.0);
    const double h = 1e-5;
    for (const BoundaryMode mode : {BoundaryMode::CASE1, BoundaryMode::CASE2}) {
        for (const double tau : {0.3, 0.6, 0.9}) {
            const auto [a, a_dot] = a_coeff(p, spec, tau, mode);
            const double ap = a_coeff(p, spec, tau + h, mode).first;
            const double am = a_coeff(p, spec, tau - h, mode).first;
            CHECK(a_dot == doctest::Approx((ap - am) / (2.0 * h)).epsilon(1e-6));
            CHECK(std::isfinite(a));
        }
    }
}

TEST_CASE("assembled derivatives agree with finite differences of 𝒫") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = init_params(arch_of({8, 8}), 5, 1.0);
    const double h = 1e-5;
    const double pts[][2] = {{0.3, 0.2}, {0.55, 0.5}, {0.8, 0.75}, {0.95, 0.35}};

    for (const BoundaryMode mode : {BoundaryMode::CASE1, BoundaryMode::CASE2}) {
        for (const auto& pt : pts) {
            const double tau = pt[0], y = pt[1];
            const AuxEval aux = evaluate(p, spec, tau, y, mode);
            const double fd_y = (evaluate(p, spec, tau, y + h, mode).p -
                                 evaluate(p, spec, tau, y - h, mode).p) /
                                (2.0 * h);
            const double fd_tau = (evaluate(p, spec, tau + h, y, mode).p -
                                   evaluate(p, spec, tau - h, y, mode).p) /
                                  (2.0 * h);
            const double fd_yy = (evaluate(p, spec, tau, y + h, mode).p_y -
                                  evaluate(p, spec, tau, y - h, mode).p_y) /
                                 (2.0 * h);
            CHECK(aux.p_y == doctest::Approx(fd_y).epsilon(1e-6));
            CHECK(aux.p_tau == doctest::Approx(fd_tau).epsilon(1e-6));
            CHECK(aux.p_yy == doctest::Approx(fd_yy).epsilon(1e-6));
        }
    }
}

TEST_CASE("free-boundary velocity is the tau-derivative of the boundary") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = init_params(arch_of({8, 8}), 5, 1.0);
    const double h = 1e-5;
    for (const double tau : {0.2, 0.5, 0.9}) {
        const auto [sf, sf_dot] = free_boundary(p, spec, tau);
        const double fd = (free_boundary(p, spec, tau + h).first -
                           free_boundary(p, spec, tau - h).first) /
                          (2.0 * h);
        CHECK(sf_dot == doctest::Approx(fd).epsilon(1e-7));
        CHECK(std::isfinite(sf));
    }
}

TEST_CASE("deep in the prefactor tail every 𝒫-term is exactly zero") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = init_params(arch_of({8, 8}), 5, 1.0);
    const AuxEval aux = evaluate(p, spec, spec.tau_min, 0.5, BoundaryMode::CASE1);
    CHECK(aux.p == 0.0);
    CHECK(aux.p_y == 0.0);
    CHECK(aux.p_tau == 0.0);
    CHECK(aux.p_yy == 0.0);
    CHECK(std::isfinite(aux.a));      // boundary data stays finite
    CHECK(std::isfinite(aux.a_dot));
}

TEST_CASE("evaluate guards its domain") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = init_params(arch_of({4}), 1, 0.1);
    CHECK_THROWS_AS(evaluate(p, spec, 1e-12, 0.5, BoundaryMode::CASE1),
                    std::domain_error);
    CHECK_THROWS_AS(evaluate(p, spec, 0.5, 1.5, BoundaryMode::CASE1),
                    std::domain_error);
    CHECK_THROWS_AS(evaluate(p, spec, 0.5, -0.1, BoundaryMode::CASE1),
                    std::domain_error);
}

TEST_CASE("greeks: exact -1 delta on the boundary, value scaling") {
    const ProblemSpec spec = preset_ltm();
    const NetworkParams p = init_params(arch_of({8, 8}), 5, 1.0);

    const Greeks gb = greeks(p, spec, 0.7, 0.0);
    const auto [sf, sf_dot] = free_boundary(p, spec, 0.7);
    CHECK(gb.S == sf);
    CHECK(gb.Delta == -1.0);  // 𝒫_y(τ,0) = −s̄_f makes this exact
    CHECK(gb.V == doctest::Approx(spec.K - sf).epsilon(1e-13));

    const Greeks gi = greeks(p, spec, 0.7, 0.4);
    const AuxEval aux = evaluate(p, spec, 0.7, 0.4, BoundaryMode::CASE1);
    CHECK(gi.S == doctest::Approx(sf * std::exp(0.4 * 6.0)).epsilon(1e-14));
    CHECK(gi.V == doctest::Approx(6.0 * aux.p).epsilon(1e-14));
    CHECK(std::isfinite(gi.Gamma));
}
