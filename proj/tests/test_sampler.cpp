#include "fbnet/sampler.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace fbnet;

namespace {

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

// Two-sided Kolmogorov–Smirnov statistic against U(lo,hi).
double ks_statistic(std::vector<double> v, double lo, double hi) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = (v[i] - lo) / (hi - lo);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

}  // namespace

TEST_CASE("uniform grid: exact endpoints, equal spacing") {
    const Grid g = uniform_grid(100, 100, 1e-8);
    REQUIRE(g.n_tau() == 100);
    REQUIRE(g.n_y() == 100);
    CHECK(g.size() == 10000);
    CHECK(g.taus.front() == 1e-8);
    CHECK(g.taus.back() == 1.0);
    CHECK(g.ys.front() == 0.0);
    CHECK(g.ys.back() == 1.0);
    CHECK(strictly_increasing(g.taus));
    CHECK(strictly_increasing(g.ys));

    // equal spacing to within one rounding of the step formula
    const double dy = 1.0 / 99.0;
    for (std::size_t i = 1; i < g.ys.size(); ++i)
        CHECK(g.ys[i] - g.ys[i - 1] == doctest::Approx(dy).epsilon(1e-12));

    CHECK_THROWS_AS(uniform_grid(1, 10, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid(10, 10, 0.0), std::invalid_argument);
}

TEST_CASE("stretched grid with p = 1 is the uniform grid, bit for bit") {
    const Grid u = uniform_grid(60, 60, 1e-8);
    const Grid s = stretched_grid(60, 60, 1.0, 1e-8);
    REQUIRE(u.n_tau() == s.n_tau());
    for (std::size_t i = 0; i < u.taus.size(); ++i) CHECK(u.taus[i] == s.taus[i]);
    for (std::size_t i = 0; i < u.ys.size(); ++i) CHECK(u.ys[i] == s.ys[i]);
}

TEST_CASE("stretched grid clusters near the singular corner") {
    const Grid g = stretched_grid(60, 60, 2.0, 1e-8);
    CHECK(g.taus.front() == 1e-8);
    CHECK(g.taus.back() == 1.0);
    CHECK(g.ys.front() == 0.0);
    CHECK(g.ys.back() == 1.0);
    CHECK(strictly_increasing(g.taus));
    CHECK(strictly_increasing(g.ys));

    // gaps grow monotonically away from τ = 0 and y = 0
    for (std::size_t i = 2; i < g.taus.size(); ++i)
        CHECK(g.taus[i] - g.taus[i - 1] > g.taus[i - 1] - g.taus[i - 2]);
    for (std::size_t i = 2; i < g.ys.size(); ++i)
        CHECK(g.ys[i] - g.ys[i - 1] > g.ys[i - 1] - g.ys[i - 2]);

    // frozen interior values for a 3-point axis: u = (1e-4+1)/2, τ = u²,
    // y = 0.5^√2
    const Grid tiny = stretched_grid(3, 3, 2.0, 1e-8);
    CHECK(tiny.taus[1] == doctest::Approx(0.2500500025).epsilon(1e-12));
    CHECK(tiny.ys[1] == doctest::Approx(0.37521422724648174).epsilon(1e-14));

    CHECK_THROWS_AS(stretched_grid(10, 10, 0.5, 1e-8), std::invalid_argument);
}

TEST_CASE("random structured grid: determinism, endpoints, monotonicity") {
    const Grid a = random_structured_grid(60, 60, 42, 1e-8);
    const Grid b = random_structured_grid(60, 60, 42, 1e-8);
    const Grid c = random_structured_grid(60, 60, 43, 1e-8);

    REQUIRE(a.n_tau() == 60);
    for (std::size_t i = 0; i < a.taus.size(); ++i) CHECK(a.taus[i] == b.taus[i]);
    for (std::size_t i = 0; i < a.ys.size(); ++i) CHECK(a.ys[i] == b.ys[i]);
    CHECK(a.taus != c.taus);  // different seed, different grid

    CHECK(a.taus.front() == 1e-8);
    CHECK(a.taus.back() == 1.0);
    CHECK(a.ys.front() == 0.0);
    CHECK(a.ys.back() == 1.0);
    CHECK(strictly_increasing(a.taus));
    CHECK(strictly_increasing(a.ys));
}

TEST_CASE("random axes look uniform (KS at the 1% level)") {
    // Interior points only: the rescale pins both extremes.
    int rejections = 0;
    const int trials = 20;
    for (int s = 0; s < trials; ++s) {
        const Grid g = random_structured_grid(200, 200, 1000 + s, 1e-8);
        std::vector<double> tin(g.taus.begin() + 1, g.taus.end() - 1);
        std::vector<double> yin(g.ys.begin() + 1, g.ys.end() - 1);
        const double crit = 1.63 / std::sqrt(198.0);  // alpha = 0.01
        if (ks_statistic(tin, 1e-8, 1.0) > crit) ++rejections;
        if (ks_statistic(yin, 0.0, 1.0) > crit) ++rejections;
    }
    // 40 tests at the 1% level: >= 4 rejections has probability < 1e-3
    CHECK(rejections <= 3);
}
