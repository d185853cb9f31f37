#include "fbnet/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fbnet {

namespace {

void check_sizes(int n_tau, int n_y, double tau_min) {
    if (n_tau < 2 || n_y < 2)
        throw std::invalid_argument("grid: n_tau and n_y must be >= 2");
    if (!(tau_min > 0.0 && tau_min < 1.0))
        throw std::invalid_argument("grid: tau_min must lie in (0,1)");
}

// Equispaced axis with endpoints set exactly (no accumulated rounding on the
// extremes, so τ floors like 1e-8 survive bit-exactly).
std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + step * i;
    v.front() = lo;
    v.back() = hi;
    return v;
}

// Fixed 53-bit uniform mapping; std::uniform_real_distribution's sequence is
// implementation-defined and would break cross-build grid determinism.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Draw n uniforms, sort, and rescale affinely so min→lo and max→hi.
std::vector<double> random_axis(std::mt19937_64& rng, int n, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (;;) {
        for (auto& x : v) x = next_uniform(rng);
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) == v.end() && v.back() > v.front())
            break;  // ties have probability ~n²/2^53; redraw rather than nudge
    }
    const double span = v.back() - v.front();
    const double v0 = v.front();
    for (auto& x : v) x = lo + (x - v0) * (hi - lo) / span;
    v.front() = lo;
    v.back() = hi;
    return v;
}

}  // namespace

Grid uniform_grid(int n_tau, int n_y, double tau_min) {
    check_sizes(n_tau, n_y, tau_min);
    Grid g;
    g.kind = GridKind::UNIFORM;
    g.taus = linspace(tau_min, 1.0, n_tau);
    g.ys = linspace(0.0, 1.0, n_y);
    return g;
}

Grid random_structured_grid(int n_tau, int n_y, std::uint64_t seed, double tau_min) {
    check_sizes(n_tau, n_y, tau_min);
    Grid g;
    g.kind = GridKind::RANDOM_STRUCTURED;
    g.seed = seed;
    std::mt19937_64 rng(seed);
    g.taus = random_axis(rng, n_tau, tau_min, 1.0);
    g.ys = random_axis(rng, n_y, 0.0, 1.0);
    return g;
}

Grid stretched_grid(int n_tau, int n_y, double p, double tau_min) {
    check_sizes(n_tau, n_y, tau_min);
    if (!(p >= 1.0)) throw std::invalid_argument("grid: stretch exponent p must be >= 1");
    Grid g;
    g.kind = GridKind::STRETCHED;
    g.p = p;
    // The underlying uniform axis starts at tau_min^{1/p} so the stretched
    // floor u^p lands exactly on tau_min instead of tau_min^p.
    g.taus = linspace(std::pow(tau_min, 1.0 / p), 1.0, n_tau);
    for (auto& t : g.taus) t = std::pow(t, p);
    g.taus.front() = tau_min;
    g.taus.back() = 1.0;
    g.ys = linspace(0.0, 1.0, n_y);
    const double sqrt_p = std::sqrt(p);
    for (auto& y : g.ys) y = std::pow(y, sqrt_p);
    g.ys.front() = 0.0;
    g.ys.back() = 1.0;
    return g;
}

}  // namespace fbnet
